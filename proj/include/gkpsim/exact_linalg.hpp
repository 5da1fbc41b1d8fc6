#pragma once

#include <string>
#include <type_traits>

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include "gkpsim/errors.hpp"

namespace gkpsim {

namespace mp = boost::multiprecision;

using BigInt = mp::number<mp::gmp_int, mp::et_off>;
using Rational = mp::number<mp::gmp_rational, mp::et_off>;

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using IntMatrix = Matrix<BigInt>;
using RationalMatrix = Matrix<Rational>;
using RationalVector = Vector<Rational>;

// P * M * Q = D with V = P^-1, U = Q^-1, so that V * D * U = M.
struct SmithDecomposition {
    IntMatrix V, D, U;
    IntMatrix Vinv, Uinv;
};

SmithDecomposition smith_normal_form(const IntMatrix& M);

BigInt lcm_denominators(const RationalMatrix& M);

// Omega in (q..q, p..p) ordering.
template <class T>
Matrix<T> symplectic_form(int n)
{
    Matrix<T> omega = Matrix<T>::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        omega(i, n + i) = T(1);
        omega(n + i, i) = T(-1);
    }
    return omega;
}

bool is_symplectic(const RationalMatrix& S);

// -Omega S^T Omega, valid only for symplectic S.
template <class T>
Matrix<T> symplectic_inverse(const Matrix<T>& S)
{
    const int n = static_cast<int>(S.rows()) / 2;
    Matrix<T> omega = symplectic_form<T>(n);
    Matrix<T> r = omega * S.transpose() * omega;
    return -r;
}

IntMatrix unimodular_inverse(const IntMatrix& V);

// Plain product that skips zero entries; block-sparse inputs stay cheap.
IntMatrix multiply_sparse(const IntMatrix& A, const IntMatrix& B);

// Fraction-free Gaussian elimination.
BigInt determinant(const IntMatrix& M);

IntMatrix to_integer(const RationalMatrix& M);
RationalMatrix to_rational(const IntMatrix& M);
Matrix<double> to_double(const RationalMatrix& M);
Matrix<double> to_double(const IntMatrix& M);

template <class T>
Matrix<T> convert_matrix(const RationalMatrix& M)
{
    if constexpr (std::is_same_v<T, Rational>) {
        return M;
    } else {
        Matrix<T> out(M.rows(), M.cols());
        for (Eigen::Index i = 0; i < M.rows(); ++i)
            for (Eigen::Index j = 0; j < M.cols(); ++j) out(i, j) = M(i, j).template convert_to<T>();
        return out;
    }
}

Rational parse_rational(const std::string& text);
std::string format_rational(const Rational& q);

// Least nonnegative residue.
BigInt mod_floor(const BigInt& a, const BigInt& m);
BigInt floor_div(const BigInt& a, const BigInt& b);

}  // namespace gkpsim
