#include "gkpsim/lattice_pdf.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace gkpsim {

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

Rational rational_gcd(const Rational& a, const Rational& b)
{
    // gcd(p1/q1, p2/q2) = gcd(p1 q2, p2 q1) / (q1 q2)
    const BigInt p1 = mp::numerator(a), q1 = mp::denominator(a);
    const BigInt p2 = mp::numerator(b), q2 = mp::denominator(b);
    BigInt g = mp::gcd(BigInt(p1 * q2), BigInt(p2 * q1));
    if (g.sign() < 0) g = -g;
    return Rational(g, BigInt(q1 * q2));
}

}  // namespace

LatticePDF build_pdf(const GaussianOperation& op)
{
    const RationalMatrix& S = op.S;
    if (S.rows() != S.cols() || S.rows() % 2 != 0 || op.c.size() != S.rows())
        throw DimensionError("build_pdf expects a 2n x 2n matrix and a 2n displacement");
    if (!is_symplectic(S)) throw NotSymplecticError("build_pdf needs a symplectic matrix");
    const Eigen::Index n = S.rows() / 2;

    // S~ stacks A^T over B^T / 2
    RationalMatrix St(2 * n, n);
    St.topRows(n) = S.block(0, 0, n, n).transpose();
    St.bottomRows(n) = S.block(0, n, n, n).transpose() * Rational(1, 2);
    const BigInt v = lcm_denominators(St);
    const IntMatrix M = to_integer(St * Rational(v));
    const SmithDecomposition snf = smith_normal_form(M);

    LatticePDF pdf;
    pdf.n = static_cast<int>(n);
    pdf.ell_unit = kSqrtPi;
    // R^{-T} = S~^T V^{-T} (I; 0) = U^T Sigma / v
    pdf.RinvT_exact.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (snf.D(i, i).is_zero()) throw ValidationError("R_invertible", "R^{-T} is singular, support is not a full lattice");
        for (Eigen::Index j = 0; j < n; ++j) pdf.RinvT_exact(i, j) = Rational(snf.U(j, i) * snf.D(j, j), v);
    }
    // t = diag(V11^T V21) mod 2
    pdf.t.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        BigInt acc = 0;
        for (Eigen::Index k = 0; k < n; ++k)
            if (!snf.V(k, j).is_zero() && !snf.V(n + k, j).is_zero()) acc += snf.V(k, j) * snf.V(n + k, j);
        pdf.t[j] = mod_floor(acc, BigInt(2));
    }
    pdf.RinvT = to_double(pdf.RinvT_exact);
    // R^T = v Sigma^-1 U^-T
    Matrix<double> uinvT = to_double(snf.Uinv).transpose();
    pdf.RT.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        pdf.RT.row(i) = uinvT.row(i) * (v.convert_to<double>() / snf.D(i, i).convert_to<double>());
    pdf.c = op.c.head(n);
    return pdf;
}

Vector<double> lattice_point(const LatticePDF& pdf, const Vector<double>& m)
{
    Vector<double> tm(pdf.n);
    for (int i = 0; i < pdf.n; ++i) tm[i] = pdf.t[i].convert_to<double>() + 2 * m[i];
    return (pdf.ell_unit * (pdf.RinvT * tm) + pdf.c).eval();
}

std::optional<SupportWitness> support_contains(const LatticePDF& pdf, const Vector<double>& x, double tol)
{
    if (x.size() != pdf.n) throw DimensionError("support_contains: point has wrong length");
    if (!(tol > 0)) throw ValidationError("tol_positive", "tolerance must be positive");
    const Vector<double> y = pdf.RT * (x - pdf.c) / pdf.ell_unit;
    Vector<double> mr(pdf.n);
    SupportWitness w;
    w.m.resize(pdf.n);
    for (int i = 0; i < pdf.n; ++i) {
        mr[i] = std::round((y[i] - pdf.t[i].convert_to<double>()) / 2);
        w.m[i] = BigInt(static_cast<long long>(mr[i]));
    }
    w.residual = x - lattice_point(pdf, mr);
    if (w.residual.cwiseAbs().maxCoeff() > tol) return std::nullopt;
    return w;
}

std::vector<Vector<double>> sample(const LatticePDF& pdf, std::size_t count, const Box& window, std::uint64_t seed)
{
    const int n = pdf.n;
    if (window.lo.size() != n || window.hi.size() != n) throw DimensionError("sample: window has wrong dimension");
    for (int i = 0; i < n; ++i)
        if (!(window.hi[i] > window.lo[i])) throw ValidationError("window", "sampling window is empty");
    // bounding box of m over the window corners
    Vector<double> mlo = Vector<double>::Constant(n, 1e300), mhi = Vector<double>::Constant(n, -1e300);
    if (n > 20) throw DimensionError("sample supports at most 20 modes");
    for (long corner = 0; corner < (1L << n); ++corner) {
        Vector<double> x(n);
        for (int i = 0; i < n; ++i) x[i] = (corner >> i & 1) ? window.hi[i] : window.lo[i];
        const Vector<double> y = pdf.RT * (x - pdf.c) / pdf.ell_unit;
        for (int i = 0; i < n; ++i) {
            const double m = (y[i] - pdf.t[i].convert_to<double>()) / 2;
            mlo[i] = std::min(mlo[i], std::floor(m) - 1);
            mhi[i] = std::max(mhi[i], std::ceil(m) + 1);
        }
    }
    auto inside = [&](const Vector<double>& x) {
        for (int i = 0; i < n; ++i)
            if (x[i] < window.lo[i] || x[i] > window.hi[i]) return false;
        return true;
    };
    double boxsize = 1;
    for (int i = 0; i < n; ++i) boxsize *= (mhi[i] - mlo[i] + 1);

    std::mt19937_64 rng(seed);
    std::vector<Vector<double>> out;
    out.reserve(count);
    if (boxsize <= 2e6) {
        std::vector<Vector<double>> points;
        Vector<double> m = mlo;
        for (;;) {
            Vector<double> x = lattice_point(pdf, m);
            if (inside(x)) points.push_back(x);
            int i = 0;
            while (i < n && m[i] == mhi[i]) {
                m[i] = mlo[i];
                ++i;
            }
            if (i == n) break;
            m[i] += 1;
        }
        if (points.empty()) throw ValidationError("nonempty_support", "no lattice point lies inside the window");
        std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
        for (std::size_t k = 0; k < count; ++k) out.push_back(points[pick(rng)]);
        return out;
    }
    std::vector<std::uniform_int_distribution<long long>> dist;
    for (int i = 0; i < n; ++i)
        dist.emplace_back(static_cast<long long>(mlo[i]), static_cast<long long>(mhi[i]));
    std::size_t misses = 0;
    while (out.size() < count) {
        Vector<double> m(n);
        for (int i = 0; i < n; ++i) m[i] = static_cast<double>(dist[i](rng));
        Vector<double> x = lattice_point(pdf, m);
        if (inside(x)) {
            out.push_back(x);
        } else if (++misses > 100000000) {
            throw ValidationError("nonempty_support", "no lattice point found inside the window");
        }
    }
    return out;
}

Vector<double> periodicity_equivalent(const LatticePDF& pdf, const GaussianOperation& op, const Vector<double>& x,
                                      const Vector<double>& m, const Vector<double>& mprime)
{
    const int n = pdf.n;
    if (op.modes() != n || x.size() != n || m.size() != n || mprime.size() != n)
        throw DimensionError("periodicity_equivalent: size mismatch");
    const Matrix<double> S = to_double(op.S);
    return x + pdf.ell_unit * (2 * S.block(0, 0, n, n) * m + S.block(0, n, n, n) * mprime);
}

SpacingSummary spacing_summary(const LatticePDF& pdf)
{
    SpacingSummary out;
    for (int i = 0; i < pdf.n; ++i) {
        Rational g = 0;
        Rational off = 0;
        for (int j = 0; j < pdf.n; ++j) {
            g = rational_gcd(g, pdf.RinvT_exact(i, j));
            off += pdf.RinvT_exact(i, j) * Rational(pdf.t[j]);
        }
        g *= 2;
        out.spacing_over_sqrt_pi.push_back(g);
        out.spacing.push_back(g.convert_to<double>() * pdf.ell_unit);
        // offset reduced into [0, spacing)
        Rational r = off - g * Rational(floor_div(BigInt(mp::numerator(off / g)), BigInt(mp::denominator(off / g))));
        out.offset.push_back(r.convert_to<double>() * pdf.ell_unit + pdf.c[i]);
    }
    out.cell_volume = std::pow(2 * pdf.ell_unit, pdf.n) * std::abs(pdf.RinvT.determinant());
    return out;
}

bool same_support(const LatticePDF& a, const LatticePDF& b, double tol)
{
    if (a.n != b.n) return false;
    // each generator of b (and its offset) must lie in a, and vice versa
    auto contained = [&](const LatticePDF& p, const LatticePDF& q) {
        const Vector<double> zero = Vector<double>::Zero(q.n);
        if (!support_contains(p, lattice_point(q, zero), tol)) return false;
        for (int i = 0; i < q.n; ++i) {
            Vector<double> e = zero;
            e[i] = 1;
            if (!support_contains(p, lattice_point(q, e), tol)) return false;
        }
        return true;
    };
    return contained(a, b) && contained(b, a);
}

}  // namespace gkpsim
