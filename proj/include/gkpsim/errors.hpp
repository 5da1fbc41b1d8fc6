#pragma once

#include <stdexcept>
#include <string>

namespace gkpsim {

// Input rejected because a named invariant does not hold. The CLI maps this
// to exit code 2.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string invariant, const std::string& what)
        : std::runtime_error(invariant + ": " + what), invariant_(std::move(invariant)) {}

    const std::string& invariant() const noexcept { return invariant_; }

private:
    std::string invariant_;
};

class DimensionError : public ValidationError {
public:
    explicit DimensionError(const std::string& what) : ValidationError("dimension", what) {}
};

class NotSymplecticError : public ValidationError {
public:
    explicit NotSymplecticError(const std::string& what) : ValidationError("is_symplectic", what) {}
};

class NotUnimodularError : public ValidationError {
public:
    explicit NotUnimodularError(const std::string& what) : ValidationError("unimodular", what) {}
};

class ConvergenceError : public ValidationError {
public:
    explicit ConvergenceError(const std::string& what) : ValidationError("convergence", what) {}
};

class DenseSupportError : public ValidationError {
public:
    explicit DenseSupportError(const std::string& what) : ValidationError("dense_support", what) {}
};

class ParseError : public ValidationError {
public:
    ParseError(const std::string& location, const std::string& what)
        : ValidationError("schema", location + ": " + what) {}
};

}  // namespace gkpsim
