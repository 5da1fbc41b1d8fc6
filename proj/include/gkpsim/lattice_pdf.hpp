#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gkpsim/gkp_core.hpp"

namespace gkpsim {

// Support of the position distribution: x = sqrt(pi) RinvT (t + 2m) + c, m in Z^n.
struct LatticePDF {
    int n = 0;
    RationalMatrix RinvT_exact;
    Matrix<double> RinvT;
    Matrix<double> RT;  // inverse of RinvT
    Vector<BigInt> t;     // entries in {0, 1}
    Vector<double> c;
    double ell_unit = 0;  // sqrt(pi)
};

LatticePDF build_pdf(const GaussianOperation& op);

struct SupportWitness {
    Vector<BigInt> m;
    Vector<double> residual;
};

std::optional<SupportWitness> support_contains(const LatticePDF& pdf, const Vector<double>& x, double tol);

Vector<double> lattice_point(const LatticePDF& pdf, const Vector<double>& m);

struct Box {
    Vector<double> lo, hi;
};

std::vector<Vector<double>> sample(const LatticePDF& pdf, std::size_t count, const Box& window, std::uint64_t seed);

Vector<double> periodicity_equivalent(const LatticePDF& pdf, const GaussianOperation& op, const Vector<double>& x,
                                      const Vector<double>& m, const Vector<double>& mprime);

// Marginal support of mode i is offset_i + spacing_i Z.
struct SpacingSummary {
    std::vector<Rational> spacing_over_sqrt_pi;
    std::vector<double> spacing;
    std::vector<double> offset;
    double cell_volume = 0;  // |det| of the lattice generator
};

SpacingSummary spacing_summary(const LatticePDF& pdf);

bool same_support(const LatticePDF& a, const LatticePDF& b, double tol = 1e-9);

}  // namespace gkpsim
