#include "gkpsim/theta.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <thread>

#include <Eigen/Eigenvalues>

#include "gkpsim/gkp_core.hpp"

namespace gkpsim {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrtPi = std::sqrt(kPi);

// q_m = exp(pi i m^2 tau) for m = 0..M
std::vector<cdouble> nome_powers(cdouble tau, int M)
{
    std::vector<cdouble> q(M + 1);
    for (int m = 0; m <= M; ++m) {
        const double mm = static_cast<double>(m) * m;
        q[m] = std::exp(cdouble(0, kPi * mm) * tau);
    }
    return q;
}

int theta_cutoff(double im_tau, double im_z, double tol)
{
    const double L = -std::log(tol);
    const double a = std::abs(im_z);
    double m = (a + std::sqrt(a * a + im_tau * L / kPi)) / im_tau;
    if (!(m < 1e8)) throw ConvergenceError("theta series needs more than 1e8 terms");
    return static_cast<int>(std::ceil(m)) + 1;
}

// Real-z evaluation 1 + 2 sum q_m cos(2 pi m z) using a cosine recurrence.
double theta_abs2_real_z(const std::vector<cdouble>& q, double z)
{
    const double c1 = std::cos(2 * kPi * z);
    double cm_prev = 1.0, cm = c1;
    cdouble acc = 1.0;
    for (std::size_t m = 1; m < q.size(); ++m) {
        acc += 2.0 * q[m] * cm;
        const double next = 2 * c1 * cm - cm_prev;
        cm_prev = cm;
        cm = next;
    }
    return std::norm(acc);
}

double golden_max(const std::function<double(double)>& f, double a, double b, double tol)
{
    const double g = (std::sqrt(5.0) - 1) / 2;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

cdouble jacobi_theta(const ThetaArgs& args) { return jacobi_theta(args.z, args.tau, args.truncation_tol); }

cdouble jacobi_theta(cdouble z, cdouble tau, double tol)
{
    if (!(tau.imag() > 0)) throw ConvergenceError("jacobi_theta requires Im tau > 0");
    const int M = theta_cutoff(tau.imag(), z.imag(), tol);
    cdouble acc = 0;
    const cdouble ipi(0, kPi);
    // sum from the tails inwards for accuracy
    for (int m = M; m >= 1; --m) {
        const double md = m;
        const cdouble quad = ipi * md * md * tau;
        acc += std::exp(quad + 2.0 * ipi * md * z) + std::exp(quad - 2.0 * ipi * md * z);
    }
    return acc + 1.0;
}

cdouble siegel_theta(const Vector<cdouble>& z, const Matrix<cdouble>& gamma, double tol)
{
    const Eigen::Index g = gamma.rows();
    if (gamma.cols() != g || z.size() != g) throw DimensionError("siegel_theta: Gamma must be g x g and z length g");
    Matrix<double> Y = gamma.imag();
    Y = 0.5 * (Y + Y.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix<double>> es(Y);
    const double lam_min = es.eigenvalues().minCoeff();
    const double lam_max = es.eigenvalues().maxCoeff();
    if (!(lam_min > 1e-14 * std::max(1.0, lam_max))) throw ConvergenceError("Im Gamma is not positive definite");

    // |term| = exp(-pi (m-c)^T Y (m-c) + const) with c = -Y^-1 Im z
    Vector<double> c = -Y.ldlt().solve(z.imag());
    Eigen::LLT<Matrix<double>> llt(Y);
    Matrix<double> R = llt.matrixU();  // Y = R^T R
    const double bound = -std::log(tol) / kPi;

    // Fincke-Pohst style enumeration from the last coordinate down.
    std::vector<double> m(g, 0.0);
    cdouble acc = 0;
    const cdouble ipi(0, kPi);
    std::function<void(Eigen::Index, double)> rec = [&](Eigen::Index i, double rem) {
        // contribution of coordinate i: R_ii (m_i - c_i) + sum_{j>i} R_ij (m_j - c_j)
        double shift = 0;
        for (Eigen::Index j = i + 1; j < g; ++j) shift += R(i, j) * (m[j] - c[j]);
        const double rii = R(i, i);
        const double center = c[i] - shift / rii;
        const double half = std::sqrt(std::max(rem, 0.0)) / rii;
        const long lo = static_cast<long>(std::ceil(center - half));
        const long hi = static_cast<long>(std::floor(center + half));
        for (long k = lo; k <= hi; ++k) {
            m[i] = static_cast<double>(k);
            const double t = rii * (m[i] - c[i]) + shift;
            const double r2 = rem - t * t;
            if (r2 < 0) continue;
            if (i == 0) {
                cdouble e = 0;
                for (Eigen::Index a = 0; a < g; ++a) {
                    cdouble row = 0;
                    for (Eigen::Index b = 0; b < g; ++b) row += gamma(a, b) * m[b];
                    e += m[a] * (ipi * row + 2.0 * ipi * z[a]);
                }
                acc += std::exp(e);
            } else {
                rec(i - 1, r2);
            }
        }
    };
    rec(g - 1, bound);
    return acc;
}

double AngleClass::theta() const
{
    switch (variant) {
        case Variant::RationalCotangent:
            return std::atan2(v.convert_to<double>(), u.convert_to<double>());
        case Variant::PiMultiple:
            return k.convert_to<double>() * kPi;
        default:
            throw DenseSupportError("irrational cotangent has no exact angle representation");
    }
}

AngleClass classify_angle(const AngleSpec& spec)
{
    AngleClass out;
    using V = AngleClass::Variant;
    switch (spec.form) {
        case AngleSpec::Form::Irrational:
            out.variant = V::IrrationalCotangent;
            return out;
        case AngleSpec::Form::Cotangent: {
            out.variant = V::RationalCotangent;
            out.u = mp::numerator(spec.value);
            out.v = mp::denominator(spec.value);
            return out;
        }
        case AngleSpec::Form::PiFraction: {
            const BigInt p = mp::numerator(spec.value);
            const BigInt q = mp::denominator(spec.value);
            if (q == 1) {
                out.variant = V::PiMultiple;
                out.k = p;
                return out;
            }
            const BigInt r = mod_floor(p, 2 * q);  // theta mod 2 pi in units of pi/q
            if (q == 2) {
                // cot(pi/2 + k pi) = 0
                out.variant = V::RationalCotangent;
                out.u = 0;
                out.v = 1;
                return out;
            }
            if (q == 4) {
                // r in {1,3,5,7}: cot = +1, -1, +1, -1
                out.variant = V::RationalCotangent;
                out.u = (r % 4 == 1) ? 1 : -1;
                out.v = 1;
                return out;
            }
            // cot(p pi/q) is irrational for every other reduced q (Niven-type result)
            out.variant = V::IrrationalCotangent;
            return out;
        }
    }
    throw ValidationError("angle_form", "unsupported symbolic angle form");
}

double rotated_pdf_numeric(double x, const AngleClass& cls, double eps_reg)
{
    if (!(eps_reg > 0)) throw ConvergenceError("regularisation epsilon must be positive");
    using V = AngleClass::Variant;
    if (cls.variant == V::IrrationalCotangent)
        throw DenseSupportError("irrational cotangent: the support is dense in the reals");
    if (cls.variant == V::PiMultiple) {
        const cdouble th = jacobi_theta(cdouble(x / (2 * kSqrtPi), 0), cdouble(0, eps_reg * eps_reg));
        return std::norm(th);
    }
    const double theta = cls.theta();
    const double s = std::sin(theta);
    const double cot = cls.u.convert_to<double>() / cls.v.convert_to<double>();
    const cdouble tau(2 * cot, eps_reg * eps_reg);
    const cdouble th = jacobi_theta(cdouble(-x / (s * kSqrtPi), 0), tau);
    return std::norm(th) / s;
}

PeakScan detect_rotated_peaks(const AngleClass& cls, double eps_reg, double z_lo, double z_hi, int threads)
{
    using V = AngleClass::Variant;
    if (cls.variant == V::IrrationalCotangent)
        throw DenseSupportError("irrational cotangent: the support is dense in the reals");
    if (!(eps_reg > 0)) throw ConvergenceError("regularisation epsilon must be positive");

    // The density is 1-periodic in z; the real part of tau is reduced mod 2.
    cdouble tau;
    double x_per_z;
    if (cls.variant == V::PiMultiple) {
        tau = cdouble(0, eps_reg * eps_reg);
        x_per_z = 2 * kSqrtPi;
    } else {
        const BigInt two_v = 2 * cls.v;
        const BigInt num = mod_floor(2 * cls.u, two_v);
        tau = cdouble(num.convert_to<double>() / cls.v.convert_to<double>(), eps_reg * eps_reg);
        x_per_z = -kSqrtPi * std::sin(cls.theta());
    }
    const int M = theta_cutoff(tau.imag(), 0.0, 1e-17);
    const std::vector<cdouble> q = nome_powers(tau, M);
    auto f = [&](double z) { return theta_abs2_real_z(q, z); };

    const double step = eps_reg / 10;
    const long npts = static_cast<long>(std::ceil((z_hi - z_lo) / step)) + 1;
    std::vector<double> vals(npts);
    const int nt = std::max(1, threads);
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            for (long i = t; i < npts; i += nt) vals[i] = f(z_lo + step * i);
        });
    }
    for (auto& th : pool) th.join();

    const double vmax = *std::max_element(vals.begin(), vals.end());
    std::vector<double> zs;
    for (long i = 1; i + 1 < npts; ++i) {
        if (vals[i] > 0.5 * vmax && vals[i] >= vals[i - 1] && vals[i] > vals[i + 1]) {
            const double a = z_lo + step * (i - 1), b = z_lo + step * (i + 1);
            zs.push_back(golden_max(f, a, b, 1e-13));
        }
    }
    PeakScan out;
    for (double z : zs) out.peaks.push_back(z * x_per_z);
    std::sort(out.peaks.begin(), out.peaks.end());
    if (out.peaks.size() >= 2) {
        out.spacing = (out.peaks.back() - out.peaks.front()) / static_cast<double>(out.peaks.size() - 1);
        for (std::size_t i = 1; i < out.peaks.size(); ++i)
            out.spacing_spread = std::max(out.spacing_spread, std::abs(out.peaks[i] - out.peaks[i - 1] - out.spacing));
    }
    return out;
}

CombSpacing rotated_comb_spacing(const AngleClass& cls, double eps_reg)
{
    using V = AngleClass::Variant;
    switch (cls.variant) {
        case V::IrrationalCotangent:
            throw DenseSupportError("irrational cotangent: the support is dense in the reals, no comb spacing");
        case V::PiMultiple:
            return {2 * kSqrtPi, CombSpacing::Source::Formula};
        case V::RationalCotangent: {
            if (cls.v % 2 == 1) {
                const double u = cls.u.convert_to<double>(), v = cls.v.convert_to<double>();
                const double sin_theta = v / std::hypot(u, v);
                return {kSqrtPi * sin_theta / v, CombSpacing::Source::Formula};
            }
            PeakScan scan = detect_rotated_peaks(cls, eps_reg);
            if (scan.peaks.size() < 2) throw ConvergenceError("peak scan found fewer than two peaks");
            return {std::abs(scan.spacing), CombSpacing::Source::Numeric};
        }
    }
    throw ValidationError("angle_class", "unknown variant");
}

bool in_Q2(const Rational& q) { return mp::denominator(q) % 2 == 1; }

bool in_RSp(const RationalMatrix& S)
{
    if (!is_symplectic(S)) throw NotSymplecticError("in_RSp expects a symplectic matrix");
    const Eigen::Index n = S.rows() / 2;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Rational& a = S(0, i);
        const Rational& b = S(0, n + i);
        if (a == 0 || b == 0) continue;
        if (!in_Q2(Rational(a / b))) return false;
    }
    return true;
}

bool in_DSp(const RationalMatrix& S)
{
    if (!is_symplectic(S)) throw NotSymplecticError("in_DSp expects a symplectic matrix");
    const Eigen::Index n = S.rows() / 2;
    // Column i of the top blocks must factor as (cos t_i, sin t_i) * atilde_i.
    RationalMatrix g(n, n);
    std::vector<Rational> w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Rational u, v;
        bool found = false;
        for (Eigen::Index j = 0; j < n && !found; ++j) {
            const Rational& a = S(j, i);
            const Rational& b = S(j, n + i);
            if (a == 0 && b == 0) continue;
            if (b == 0) {
                u = 1;
                v = 0;
            } else {
                const Rational cot = a / b;
                u = Rational(mp::numerator(cot));
                v = Rational(mp::denominator(cot));
            }
            found = true;
        }
        if (!found) return false;  // zero column, not invertible
        for (Eigen::Index j = 0; j < n; ++j)
            if (S(j, i) * v != S(j, n + i) * u) return false;  // columns not parallel
        if (v != 0 && !in_Q2(Rational(u / v))) return false;
        w[i] = u * u + v * v;
        for (Eigen::Index j = 0; j < n; ++j) g(j, i) = (u != 0) ? Rational(S(j, i) / u) : Rational(S(j, n + i) / v);
    }
    // atilde_ji = sigma_i g_ji sqrt(w_i); find signs making it symmetric.
    std::vector<int> sigma(n, 0);
    for (Eigen::Index start = 0; start < n; ++start) {
        if (sigma[start] != 0) continue;
        sigma[start] = 1;
        std::vector<Eigen::Index> stack{start};
        while (!stack.empty()) {
            const Eigen::Index i = stack.back();
            stack.pop_back();
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i == j) continue;
                const Rational& gji = g(j, i);
                const Rational& gij = g(i, j);
                if ((gji == 0) != (gij == 0)) return false;
                if (gji == 0) continue;
                if (gji * gji * w[i] != gij * gij * w[j]) return false;
                const int need = sigma[i] * (gji > 0 ? 1 : -1) * (gij > 0 ? 1 : -1);
                if (sigma[j] == 0) {
                    sigma[j] = need;
                    stack.push_back(j);
                } else if (sigma[j] != need) {
                    return false;
                }
            }
        }
    }
    return determinant(to_integer(g * Rational(lcm_denominators(g)))) != 0;
}

std::vector<double> single_mode_outcome_sample(const GaussianOperation& op, std::size_t count, Window1D window,
                                               std::uint64_t seed)
{
    if (!in_RSp(op.S)) throw ValidationError("in_RSp", "operation is outside the single-mode-measurement class");
    if (!(window.hi > window.lo)) throw ValidationError("window", "empty sampling window");
    const Eigen::Index n = op.S.rows() / 2;
    std::vector<double> step;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Rational& a = op.S(0, i);
        const Rational& b = op.S(0, n + i);
        if (a == 0 && b == 0) continue;
        const double s = std::hypot(a.convert_to<double>(), b.convert_to<double>());
        AngleClass cls = (b == 0) ? classify_angle(AngleSpec::pi_fraction(Rational(a > 0 ? 0 : 1)))
                                  : classify_angle(AngleSpec::cotangent(Rational(a / b)));
        step.push_back(s * rotated_comb_spacing(cls).spacing);
    }
    const double c = op.c.size() > 0 ? op.c[0] : 0.0;
    const double reach = std::max(std::abs(window.lo - c), std::abs(window.hi - c));
    std::mt19937_64 rng(seed);
    std::vector<std::uniform_int_distribution<long>> dists;
    for (double h : step) {
        const long K = static_cast<long>(std::ceil(reach / h));
        dists.emplace_back(-K, K);
    }
    std::vector<double> out;
    out.reserve(count);
    std::size_t attempts = 0;
    while (out.size() < count) {
        if (++attempts > 1000 * (count + 10)) throw ValidationError("window", "window intersects too few support points");
        double x = c;
        for (std::size_t i = 0; i < step.size(); ++i) x += step[i] * static_cast<double>(dists[i](rng));
        if (x >= window.lo && x <= window.hi) out.push_back(x);
    }
    return out;
}

}  // namespace gkpsim
