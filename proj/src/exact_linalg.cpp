#include "gkpsim/exact_linalg.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace gkpsim {

namespace {

BigInt abs_big(const BigInt& x) { return x.sign() < 0 ? BigInt(-x) : x; }

struct SnfWork {
    IntMatrix A, P, Pinv, Q, Qinv;
    Eigen::Index m, n;

    explicit SnfWork(const IntMatrix& M)
        : A(M), P(IntMatrix::Identity(M.rows(), M.rows())), Pinv(P),
          Q(IntMatrix::Identity(M.cols(), M.cols())), Qinv(Q), m(M.rows()), n(M.cols()) {}

    void swap_rows(Eigen::Index i, Eigen::Index k)
    {
        if (i == k) return;
        A.row(i).swap(A.row(k));
        P.row(i).swap(P.row(k));
        Pinv.col(i).swap(Pinv.col(k));
    }
    void swap_cols(Eigen::Index j, Eigen::Index k)
    {
        if (j == k) return;
        A.col(j).swap(A.col(k));
        Q.col(j).swap(Q.col(k));
        Qinv.row(j).swap(Qinv.row(k));
    }
    void negate_row(Eigen::Index i)
    {
        for (Eigen::Index c = 0; c < n; ++c) A(i, c) = -A(i, c);
        for (Eigen::Index c = 0; c < m; ++c) P(i, c) = -P(i, c);
        for (Eigen::Index r = 0; r < m; ++r) Pinv(r, i) = -Pinv(r, i);
    }
    // row_i -= q * row_k
    void row_axpy(Eigen::Index i, Eigen::Index k, const BigInt& q)
    {
        for (Eigen::Index c = 0; c < n; ++c)
            if (!A(k, c).is_zero()) A(i, c) -= q * A(k, c);
        for (Eigen::Index c = 0; c < m; ++c)
            if (!P(k, c).is_zero()) P(i, c) -= q * P(k, c);
        for (Eigen::Index r = 0; r < m; ++r)
            if (!Pinv(r, i).is_zero()) Pinv(r, k) += q * Pinv(r, i);
    }
    // col_j -= q * col_k
    void col_axpy(Eigen::Index j, Eigen::Index k, const BigInt& q)
    {
        for (Eigen::Index r = 0; r < m; ++r)
            if (!A(r, k).is_zero()) A(r, j) -= q * A(r, k);
        for (Eigen::Index r = 0; r < n; ++r)
            if (!Q(r, k).is_zero()) Q(r, j) -= q * Q(r, k);
        for (Eigen::Index c = 0; c < n; ++c)
            if (!Qinv(j, c).is_zero()) Qinv(k, c) += q * Qinv(j, c);
    }

    bool find_pivot(Eigen::Index k, Eigen::Index& pi, Eigen::Index& pj) const
    {
        bool found = false;
        BigInt best;
        for (Eigen::Index j = k; j < n; ++j) {
            for (Eigen::Index i = k; i < m; ++i) {
                const BigInt& x = A(i, j);
                if (x.is_zero()) continue;
                BigInt ax = abs_big(x);
                if (!found || ax < best) {
                    best = ax;
                    pi = i;
                    pj = j;
                    found = true;
                    if (best == 1) return true;
                }
            }
        }
        return found;
    }

    void run()
    {
        const Eigen::Index r = std::min(m, n);
        for (Eigen::Index k = 0; k < r; ++k) {
            for (;;) {
                Eigen::Index pi = 0, pj = 0;
                if (!find_pivot(k, pi, pj)) return;
                swap_rows(k, pi);
                swap_cols(k, pj);
                const BigInt piv = A(k, k);
                bool clean = true;
                for (Eigen::Index i = k + 1; i < m; ++i) {
                    if (A(i, k).is_zero()) continue;
                    BigInt q = A(i, k) / piv;
                    if (!q.is_zero()) row_axpy(i, k, q);
                    if (!A(i, k).is_zero()) clean = false;
                }
                for (Eigen::Index j = k + 1; j < n; ++j) {
                    if (A(k, j).is_zero()) continue;
                    BigInt q = A(k, j) / piv;
                    if (!q.is_zero()) col_axpy(j, k, q);
                    if (!A(k, j).is_zero()) clean = false;
                }
                if (!clean) continue;
                // pivot row and column are clear; enforce divisibility of the rest
                bool divides = true;
                if (abs_big(piv) != 1) {
                    for (Eigen::Index i = k + 1; i < m && divides; ++i) {
                        for (Eigen::Index j = k + 1; j < n; ++j) {
                            if (A(i, j).is_zero()) continue;
                            if (!(A(i, j) % piv).is_zero()) {
                                // row_k += row_i
                                row_axpy(k, i, BigInt(-1));
                                divides = false;
                                break;
                            }
                        }
                    }
                }
                if (divides) break;
            }
            if (A(k, k).sign() < 0) negate_row(k);
        }
    }
};

}  // namespace

SmithDecomposition smith_normal_form(const IntMatrix& M)
{
    if (M.rows() == 0 || M.cols() == 0) throw DimensionError("smith_normal_form needs a nonempty matrix");
    SnfWork w(M);
    w.run();
    SmithDecomposition out;
    out.D = std::move(w.A);
    out.V = std::move(w.Pinv);
    out.Vinv = std::move(w.P);
    out.U = std::move(w.Qinv);
    out.Uinv = std::move(w.Q);
    return out;
}

BigInt lcm_denominators(const RationalMatrix& M)
{
    BigInt v = 1;
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) v = mp::lcm(v, BigInt(mp::denominator(M(i, j))));
    return v;
}

namespace {

// N^T Omega N == L^2 Omega, checked on the strict upper triangle (the product is antisymmetric)
template <class Entry, class Acc>
bool scaled_symplectic(const std::vector<Entry>& N, Eigen::Index n2, const Acc& L2)
{
    const Eigen::Index n = n2 / 2;
    auto at = [&](Eigen::Index r, Eigen::Index c) -> const Entry& { return N[c * n2 + r]; };
    for (Eigen::Index i = 0; i < n2; ++i)
        for (Eigen::Index j = i + 1; j < n2; ++j) {
            Acc acc = 0;
            for (Eigen::Index k = 0; k < n; ++k) {
                acc += Acc(at(k, i)) * Acc(at(k + n, j));
                acc -= Acc(at(k + n, i)) * Acc(at(k, j));
            }
            const Acc want = (j == i + n) ? L2 : Acc(0);
            if (acc != want) return false;
        }
    return true;
}

}  // namespace

bool is_symplectic(const RationalMatrix& S)
{
    if (S.rows() != S.cols() || S.rows() % 2 != 0 || S.rows() == 0)
        throw DimensionError("is_symplectic expects a square matrix of even size, got " +
                             std::to_string(S.rows()) + "x" + std::to_string(S.cols()));
    const Eigen::Index n2 = S.rows();
    const BigInt L = lcm_denominators(S);
    std::vector<BigInt> N(static_cast<std::size_t>(n2 * n2));
    bool small = L < (BigInt(1) << 60);
    const BigInt bound = BigInt(1) << 40;
    for (Eigen::Index c = 0; c < n2; ++c)
        for (Eigen::Index r = 0; r < n2; ++r) {
            BigInt& e = N[c * n2 + r];
            e = mp::numerator(S(r, c)) * (L / mp::denominator(S(r, c)));
            if (small && mp::abs(e) >= bound) small = false;
        }
    const BigInt L2 = L * L;
    if (small && n2 < (1 << 20)) {
        std::vector<std::int64_t> Ni(N.size());
        for (std::size_t i = 0; i < N.size(); ++i) Ni[i] = N[i].convert_to<std::int64_t>();
        const std::int64_t l = L.convert_to<std::int64_t>();
        return scaled_symplectic(Ni, n2, static_cast<__int128>(l) * l);
    }
    return scaled_symplectic(N, n2, L2);
}

IntMatrix multiply_sparse(const IntMatrix& A, const IntMatrix& B)
{
    if (A.cols() != B.rows()) throw DimensionError("multiply_sparse: inner dimensions differ");
    IntMatrix C = IntMatrix::Zero(A.rows(), B.cols());
    for (Eigen::Index k = 0; k < A.cols(); ++k) {
        std::vector<Eigen::Index> brow;
        for (Eigen::Index j = 0; j < B.cols(); ++j)
            if (!B(k, j).is_zero()) brow.push_back(j);
        if (brow.empty()) continue;
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            const BigInt& a = A(i, k);
            if (a.is_zero()) continue;
            for (Eigen::Index j : brow) C(i, j) += a * B(k, j);
        }
    }
    return C;
}

IntMatrix unimodular_inverse(const IntMatrix& V)
{
    if (V.rows() != V.cols() || V.rows() == 0) throw DimensionError("unimodular_inverse expects a square matrix");
    SmithDecomposition s = smith_normal_form(V);
    for (Eigen::Index i = 0; i < V.rows(); ++i)
        if (s.D(i, i) != 1) throw NotUnimodularError("|det V| != 1");
    // Vinv * V * Uinv = I
    IntMatrix inv = s.Uinv * s.Vinv;
    return inv;
}

BigInt determinant(const IntMatrix& M)
{
    if (M.rows() != M.cols()) throw DimensionError("determinant expects a square matrix");
    const Eigen::Index n = M.rows();
    if (n == 0) return BigInt(1);
    IntMatrix a = M;
    BigInt prev = 1;
    int sign = 1;
    for (Eigen::Index k = 0; k < n - 1; ++k) {
        if (a(k, k).is_zero()) {
            Eigen::Index p = k + 1;
            while (p < n && a(p, k).is_zero()) ++p;
            if (p == n) return BigInt(0);
            a.row(k).swap(a.row(p));
            sign = -sign;
        }
        for (Eigen::Index i = k + 1; i < n; ++i) {
            for (Eigen::Index j = k + 1; j < n; ++j) {
                a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
            }
        }
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

IntMatrix to_integer(const RationalMatrix& M)
{
    IntMatrix out(M.rows(), M.cols());
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            if (mp::denominator(M(i, j)) != 1) throw ValidationError("integral", "matrix entry is not an integer");
            out(i, j) = BigInt(mp::numerator(M(i, j)));
        }
    return out;
}

RationalMatrix to_rational(const IntMatrix& M)
{
    RationalMatrix out(M.rows(), M.cols());
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) out(i, j) = Rational(M(i, j));
    return out;
}

Matrix<double> to_double(const RationalMatrix& M)
{
    Matrix<double> out(M.rows(), M.cols());
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) out(i, j) = M(i, j).convert_to<double>();
    return out;
}

Matrix<double> to_double(const IntMatrix& M)
{
    Matrix<double> out(M.rows(), M.cols());
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) out(i, j) = M(i, j).convert_to<double>();
    return out;
}

Rational parse_rational(const std::string& text)
{
    auto bad = [&] { return ParseError("rational", "cannot parse '" + text + "' as p/q"); };
    if (text.empty()) throw bad();
    std::string num = text, den = "1";
    if (auto slash = text.find('/'); slash != std::string::npos) {
        num = text.substr(0, slash);
        den = text.substr(slash + 1);
    }
    auto valid = [](const std::string& s, bool allow_sign) {
        if (s.empty()) return false;
        size_t i = 0;
        if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
        if (i == s.size()) return false;
        for (; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9') return false;
        return true;
    };
    if (!valid(num, true) || !valid(den, false)) throw bad();
    BigInt p(num[0] == '+' ? num.substr(1) : num), q(den);
    if (q.is_zero()) throw ParseError("rational", "zero denominator in '" + text + "'");
    return Rational(p, q);
}

std::string format_rational(const Rational& q)
{
    if (mp::denominator(q) == 1) return mp::numerator(q).str();
    return mp::numerator(q).str() + "/" + mp::denominator(q).str();
}

BigInt mod_floor(const BigInt& a, const BigInt& m)
{
    BigInt r = a % m;
    if (r.sign() < 0) r += abs_big(m);
    return r;
}

BigInt floor_div(const BigInt& a, const BigInt& b)
{
    BigInt q = a / b;
    if (!(a % b).is_zero() && ((a.sign() < 0) != (b.sign() < 0))) q -= 1;
    return q;
}

}  // namespace gkpsim
