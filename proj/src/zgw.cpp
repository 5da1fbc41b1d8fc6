#include "gkpsim/zgw.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "gkpsim/tableau.hpp"
#include "gkpsim/theta.hpp"

namespace gkpsim {

namespace {

constexpr double kPi = std::numbers::pi;

void require_odd(int d)
{
    if (d < 3 || d % 2 == 0) throw ValidationError("odd_dimension", "the Zak-Gross Wigner function needs odd d");
}

long modp(long a, long m)
{
    long r = a % m;
    return r < 0 ? r + m : r;
}

double wrap(double x, double period)
{
    double r = std::fmod(x, period);
    if (r < 0) r += period;
    if (r >= period) r -= period;
    return r;
}

template <class F>
void parallel_for(long count, int threads, F&& body)
{
    const int nt = std::max(1, std::min<int>(threads, static_cast<int>(std::max<long>(count, 1))));
    if (nt == 1) {
        for (long i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&, t] {
            for (long i = t; i < count; i += nt) body(i);
        });
    for (auto& th : pool) th.join();
}

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Matrix<double> gross_wigner(const Matrix<cdouble>& rho, int d)
{
    require_odd(d);
    if (rho.rows() != d || rho.cols() != d) throw DimensionError("density matrix must be d x d");
    const long h = (d + 1) / 2;
    auto omega = [&](long k) { return std::exp(cdouble(0, 2 * kPi * static_cast<double>(modp(k, d)) / d)); };
    // characteristic values Tr(W(k) rho)
    Matrix<cdouble> chi(d, d);
    for (long kx = 0; kx < d; ++kx)
        for (long kz = 0; kz < d; ++kz) {
            cdouble acc = 0;
            for (long j = 0; j < d; ++j) acc += omega(h * kx * kz + kz * j) * rho(j, modp(j + kx, d));
            chi(kx, kz) = acc;
        }
    Matrix<double> W(d, d);
    double max_imag = 0;
    for (long tx = 0; tx < d; ++tx)
        for (long tz = 0; tz < d; ++tz) {
            cdouble acc = 0;
            for (long kx = 0; kx < d; ++kx)
                for (long kz = 0; kz < d; ++kz) acc += chi(kx, kz) * omega(-(tx * kz - tz * kx));
            acc /= static_cast<double>(d) * d;
            W(tx, tz) = acc.real();
            max_imag = std::max(max_imag, std::abs(acc.imag()));
        }
    if (max_imag > 1e-9) throw ValidationError("hermitian", "density matrix is not Hermitian");
    return W;
}

IdealZGW zgw_ideal(const LogicalDensityMatrix& rho)
{
    IdealZGW out;
    out.d = rho.d;
    out.ell = GKPParameters::make(rho.d).ell;
    out.weights = gross_wigner(rho.rho, rho.d);
    return out;
}

int zgw_truncation(double ell, double delta) { return static_cast<int>(std::ceil(12.0 / (ell * delta))); }

ChiTable characteristic_table(const GaussianSum& psi, int d, int M, int threads)
{
    if (M < 0) throw ValidationError("truncation", "truncation must be nonnegative");
    ChiTable out;
    out.d = d;
    out.ell = GKPParameters::make(d).ell;
    out.M = M;
    const int W = 2 * M + 1;
    out.values.assign(static_cast<std::size_t>(W) * W, 0.0);
    const auto& T = psi.terms();
    const double norm = psi.norm2();
    if (!(norm > 0)) throw ValidationError("normalizable", "state has zero norm");
    const double ell = out.ell;
    parallel_for(W, threads, [&](long a) {
        const double h = ell * static_cast<double>(a - M) / 2;
        for (const auto& ti : T) {
            const cdouble ai = std::conj(ti.a), bi = std::conj(ti.b), ci = std::conj(ti.c);
            for (const auto& tj : T) {
                const cdouble A = ai + tj.a;
                const cdouble B0 = -ai * h + bi + tj.a * h + tj.b;
                const cdouble C = -0.5 * ai * h * h + bi * h + ci - 0.5 * tj.a * h * h - tj.b * h + tj.c;
                const cdouble pre = std::sqrt(2 * kPi / A);
                // largest Re of the exponent over all real k
                const double lin = (cdouble(0, 1) * B0 / A).real(), quad = (0.5 / A).real();
                const double peak = (B0 * B0 / (2.0 * A) + C).real() + lin * lin / (4 * quad);
                if (peak + std::log(std::abs(pre)) < -60) continue;
                for (int b = 0; b < W; ++b) {
                    const double k = ell * (b - M);
                    const cdouble B = B0 + cdouble(0, k);
                    out.values[a * W + b] += pre * std::exp(B * B / (2.0 * A) + C);
                }
            }
        }
        for (int b = 0; b < W; ++b) out.values[a * W + b] /= norm;
    });
    return out;
}

double ZGWGridSingleMode::at(long iu, long iv) const
{
    return values[modp(iu, resolution) * resolution + modp(iv, resolution)];
}

double ZGWGridSingleMode::integral() const
{
    double acc = 0;
    for (double x : values) acc += x;
    return acc * cell_area;
}

double ZGWGridSingleMode::one_norm() const
{
    double acc = 0;
    for (double x : values) acc += std::abs(x);
    return acc * cell_area;
}

double ZGWGridSingleMode::min_value() const { return *std::min_element(values.begin(), values.end()); }

ZGWGridSingleMode zgw_grid(const ChiTable& chi, int resolution, double offset, int threads)
{
    require_odd(chi.d);
    if (resolution < 2) throw ValidationError("resolution", "grid needs at least 2 points per axis");
    ZGWGridSingleMode g;
    g.d = chi.d;
    g.resolution = resolution;
    g.ell = chi.ell;
    g.offset = offset;
    g.cell_area = std::pow(g.period() / resolution, 2);
    g.values.assign(static_cast<std::size_t>(resolution) * resolution, 0.0);
    const int M = chi.M, W = 2 * M + 1;
    const double ell = chi.ell;
    std::vector<double> imag(resolution, 0.0);
    // phases e^{i ell m x} at grid coordinates, computed once per axis
    std::vector<cdouble> ph(static_cast<std::size_t>(resolution) * W);
    for (int i = 0; i < resolution; ++i)
        for (int m = -M; m <= M; ++m) ph[i * W + (m + M)] = std::exp(cdouble(0, ell * m * g.coord(i)));
    parallel_for(resolution, threads, [&](long a) {
        std::vector<cdouble> row(W);
        for (int mx = -M; mx <= M; ++mx) {
            cdouble acc = 0;
            for (int mz = -M; mz <= M; ++mz) {
                const double sgn = ((mx * mz) % 2 == 0) ? 1.0 : -1.0;
                acc += sgn * chi(mx, mz) * std::conj(ph[a * W + (mz + M)]);
            }
            row[mx + M] = acc;
        }
        for (int b = 0; b < resolution; ++b) {
            cdouble acc = 0;
            for (int mx = -M; mx <= M; ++mx) acc += row[mx + M] * ph[b * W + (mx + M)];
            acc /= 2 * kPi * chi.d;
            g.values[a * resolution + b] = acc.real();
            imag[a] = std::max(imag[a], std::abs(acc.imag()));
        }
    });
    g.max_imag = *std::max_element(imag.begin(), imag.end());
    return g;
}

cdouble zgw_point(const ChiTable& chi, double u, double v)
{
    const int M = chi.M;
    cdouble acc = 0;
    for (int mx = -M; mx <= M; ++mx) {
        cdouble inner = 0;
        for (int mz = -M; mz <= M; ++mz) {
            const double sgn = ((mx * mz) % 2 == 0) ? 1.0 : -1.0;
            inner += sgn * chi(mx, mz) * std::exp(cdouble(0, -chi.ell * mz * u));
        }
        acc += inner * std::exp(cdouble(0, chi.ell * mx * v));
    }
    return acc / (2 * kPi * chi.d);
}

Matrix<cdouble> zgw_gamma(int d, double delta, RealisticForm form)
{
    require_odd(d);
    if (!(delta > 0)) throw ConvergenceError("delta must be positive");
    const double D2 = delta * delta, D4 = D2 * D2;
    const cdouble I(0, 1);
    Matrix<cdouble> G(4, 4);
    if (form == RealisticForm::PeakWeighted) {
        G << I / (d * D2), 1.0, -I / D2, I / D2,
             1.0, I * D2 / double(d), 1.0, 1.0,
             -I / D2, 1.0, I * double(d) * (1 + 2 * D4) / D2, -I * double(d) / D2,
             I / D2, 1.0, -I * double(d) / D2, I * double(d) * (1 + 2 * D4) / D2;
        return G * 0.5;
    }
    const double rho = 1 + D4;
    G << I * rho / (d * D2), 1.0, -I / D2, I / D2,
         1.0, I * D2 / (d * rho), 1.0 / rho, 1.0 / rho,
         -I / D2, 1.0 / rho, I * double(d) * (1 + 2 * D4) / (rho * D2), -I * double(d) / (rho * D2),
         I / D2, 1.0 / rho, -I * double(d) / (rho * D2), I * double(d) * (1 + 2 * D4) / (rho * D2);
    return G * 0.5;
}

double zgw_siegel(double u, double v, int d, double delta, RealisticForm form)
{
    const Matrix<cdouble> G = zgw_gamma(d, delta, form);
    const double ell = GKPParameters::make(d).ell;
    Vector<cdouble> z = Vector<cdouble>::Zero(4);
    z[0] = v / (d * ell);
    z[1] = -u / (d * ell);
    // only (m1, m2) = 0 survives the torus integral
    const Matrix<cdouble> Gk = G.block(2, 2, 2, 2);
    const cdouble norm = std::pow(d * ell, 2) * siegel_theta(Vector<cdouble>::Zero(2), Gk);
    return (siegel_theta(z, G) / norm).real();
}

double zgw_realistic(double u, double v, const RealisticGKPState& state)
{
    require_odd(state.d);
    bool zero_logical = !state.amplitudes.empty() && state.amplitudes[0] != cdouble(0);
    for (std::size_t j = 1; j < state.amplitudes.size(); ++j) zero_logical = zero_logical && state.amplitudes[j] == cdouble(0);
    if (zero_logical) return zgw_siegel(u, v, state.d, state.delta, state.form);
    const double ell = GKPParameters::make(state.d).ell;
    const ChiTable chi = characteristic_table(state.gaussian_sum(), state.d, zgw_truncation(ell, state.delta));
    return zgw_point(chi, u, v).real();
}

NegativityReport negativity(const ZGWGridSingleMode& grid, double tol)
{
    NegativityReport r;
    r.per_mode_M.push_back(grid.one_norm());
    r.total_M = r.per_mode_M[0];
    r.standardisation_ok = std::abs(grid.integral() - 1) <= tol;
    return r;
}

NegativityReport negativity(const ProductZGW& grids, double tol)
{
    NegativityReport r;
    for (const auto& g : grids.modes) {
        NegativityReport one = negativity(g, tol);
        r.per_mode_M.push_back(one.total_M);
        r.total_M *= one.total_M;
        r.standardisation_ok = r.standardisation_ok && one.standardisation_ok;
    }
    return r;
}

NegativityReport negativity(const IdealZGW& ideal)
{
    NegativityReport r;
    r.per_mode_M.push_back(ideal.one_norm());
    r.total_M = r.per_mode_M[0];
    r.standardisation_ok = std::abs(ideal.weights.sum() - 1) < 1e-12;
    return r;
}

CliffordAction clifford_action(const GaussianOperation& op, int d)
{
    require_odd(d);
    const int n2 = static_cast<int>(op.S.rows()), n = n2 / 2;
    CliffordAction a;
    a.S.resize(n2, n2);
    for (int i = 0; i < n2; ++i)
        for (int j = 0; j < n2; ++j) {
            if (mp::denominator(op.S(i, j)) != 1)
                throw ValidationError("integer_symplectic", "ZGW covariance needs an integer symplectic matrix");
            a.S(i, j) = mp::numerator(op.S(i, j)).convert_to<long>();
        }
    // parity vector (diag(A^T C), diag(B^T D)) mod 2
    std::vector<long> t(n2, 0);
    for (int k = 0; k < n; ++k) {
        long tx = 0, tz = 0;
        for (int r = 0; r < n; ++r) {
            tx += a.S(r, k) * a.S(n + r, k);
            tz += a.S(r, n + k) * a.S(n + r, n + k);
        }
        t[k] = modp(tx, 2);
        t[n + k] = modp(tz, 2);
    }
    // y = -(d ell / 2) Omega t, written in units of ell / 2
    std::vector<long> y(n2);
    for (int k = 0; k < n; ++k) {
        y[k] = -d * t[n + k];
        y[n + k] = d * t[k];
    }
    a.t_shift.assign(n2, 0);
    for (int i = 0; i < n2; ++i) {
        long acc = 0;
        for (int j = 0; j < n2; ++j) acc += a.S(i, j) * y[j];
        a.t_shift[i] = modp(acc, 2L * d);
    }
    a.c = op.c;
    return a;
}

Vector<double> clifford_transform(const Vector<double>& eta, const CliffordAction& action, int d)
{
    const double ell = GKPParameters::make(d).ell, period = d * ell;
    const Eigen::Index n2 = action.S.rows();
    if (eta.size() != n2) throw DimensionError("phase-space point has wrong length");
    Vector<double> out = action.S.cast<double>() * eta;
    for (Eigen::Index i = 0; i < n2; ++i) out[i] = wrap(out[i] - 0.5 * ell * action.t_shift[i] + action.c[i], period);
    return out;
}

Vector<double> clifford_pullback(const Vector<double>& eta, const CliffordAction& action, int d)
{
    const double ell = GKPParameters::make(d).ell, period = d * ell;
    const Eigen::Index n2 = action.S.rows(), n = n2 / 2;
    Matrix<long> omega = Matrix<long>::Zero(n2, n2);
    for (Eigen::Index i = 0; i < n; ++i) {
        omega(i, n + i) = 1;
        omega(n + i, i) = -1;
    }
    const Matrix<long> Sinv = -(omega * action.S.transpose() * omega);
    Vector<double> shifted(n2);
    for (Eigen::Index i = 0; i < n2; ++i) shifted[i] = eta[i] - action.c[i] + 0.5 * ell * action.t_shift[i];
    Vector<double> out = Sinv.cast<double>() * shifted;
    for (Eigen::Index i = 0; i < n2; ++i) out[i] = wrap(out[i], period);
    return out;
}

std::size_t hoeffding_samples(double epsilon, double delta, double M)
{
    if (!(epsilon > 0) || !(delta > 0) || !(delta < 1)) throw ValidationError("estimator_config", "need epsilon > 0 and 0 < delta < 1");
    const double n = (2.0 / (epsilon * epsilon)) * M * M * std::log(2.0 / delta);
    // guard against n landing a rounding error above an integer
    const double r = std::round(n);
    if (std::abs(n - r) < 1e-9 * std::max(1.0, n)) return static_cast<std::size_t>(r);
    return static_cast<std::size_t>(std::ceil(n));
}

namespace {

struct ModeSampler {
    std::vector<double> cdf;
    std::vector<double> u, v;
    std::vector<double> sign;
    double width = 0;  // jitter box side; zero for point masses
    double M = 1;
};

ModeSampler sampler_from_grid(const ZGWGridSingleMode& g)
{
    ModeSampler s;
    const int R = g.resolution;
    s.width = g.period() / R;
    double acc = 0;
    for (int a = 0; a < R; ++a)
        for (int b = 0; b < R; ++b) {
            const double w = g.values[a * R + b];
            acc += std::abs(w) * g.cell_area;
            s.cdf.push_back(acc);
            s.u.push_back(g.coord(a));
            s.v.push_back(g.coord(b));
            s.sign.push_back(w < 0 ? -1.0 : 1.0);
        }
    s.M = acc;
    return s;
}

ModeSampler sampler_from_ideal(const IdealZGW& z)
{
    ModeSampler s;
    double acc = 0;
    for (int a = 0; a < z.d; ++a)
        for (int b = 0; b < z.d; ++b) {
            const double w = z.weights(a, b);
            acc += std::abs(w);
            s.cdf.push_back(acc);
            s.u.push_back(a * z.ell);
            s.v.push_back(b * z.ell);
            s.sign.push_back(w < 0 ? -1.0 : 1.0);
        }
    s.M = acc;
    return s;
}

}  // namespace

EstimateResult estimate_pdf(const CircuitDescription& circuit, const EstimatorConfig& cfg, std::uint64_t seed)
{
    const int d = circuit.d, n = circuit.n;
    require_odd(d);
    if (circuit.measurement.kind != MeasurementKind::ModularPosition)
        throw ValidationError("modular_measurement", "the estimator supports modular-position measurement only");
    for (const auto& st : circuit.steps)
        if (st.is_measurement) throw ValidationError("modular_measurement", "in-line measurements are not supported here");
    const GKPParameters p = GKPParameters::make(d);

    std::vector<ModeSampler> samplers;
    for (const auto& in : circuit.inputs) {
        if (in.kind == InputKind::Ideal) {
            std::vector<cdouble> psi(d, 0.0);
            psi[in.label] = 1.0;
            samplers.push_back(sampler_from_ideal(zgw_ideal(LogicalDensityMatrix::pure(psi))));
            continue;
        }
        GaussianSum g;
        double delta = 1.0;
        if (in.kind == InputKind::Vacuum) {
            g = vacuum_state();
        } else {
            RealisticGKPState st;
            st.d = d;
            st.delta = in.delta;
            st.amplitudes = in.amplitudes;
            if (st.amplitudes.empty()) {
                st.amplitudes.assign(d, 0.0);
                st.amplitudes[in.label] = 1.0;
            }
            g = st.gaussian_sum();
            delta = in.delta;
        }
        const ChiTable chi = characteristic_table(g, d, zgw_truncation(p.ell, delta), cfg.threads);
        samplers.push_back(sampler_from_grid(zgw_grid(chi, cfg.resolution, 0.5, cfg.threads)));
    }
    double M = 1;
    for (const auto& s : samplers) M *= s.M;

    const std::size_t bound = hoeffding_samples(cfg.epsilon, cfg.delta, M);
    std::size_t N = cfg.N == 0 ? bound : cfg.N;
    if (cfg.enforce_bound && N < bound)
        throw ValidationError("hoeffding_bound", "N = " + std::to_string(N) + " is below the bound " + std::to_string(bound));

    const CliffordAction action = clifford_action(circuit.total_operation(), d);
    const double width = cfg.bin_width > 0 ? cfg.bin_width : p.ell / 64;
    const double period = d * p.ell;
    const long nb = static_cast<long>(std::ceil(period / width - 1e-9));
    const std::vector<int>& modes = circuit.measurement.modes;
    const int k = static_cast<int>(modes.size());
    if (k < 1 || k > 3) throw ValidationError("modular_measurement", "measure between one and three modes");
    long total_bins = 1;
    for (int i = 0; i < k; ++i) total_bins *= nb;
    if (total_bins > 20000000) throw ValidationError("bin_count", "too many outcome bins, widen the bins");

    const std::size_t shard = 8192;
    const std::size_t shards = (N + shard - 1) / shard;
    std::vector<std::vector<double>> sum(shards), sum2(shards);
    parallel_for(static_cast<long>(shards), cfg.threads, [&](long sh) {
        std::vector<double> s1(total_bins, 0.0), s2(total_bins, 0.0);
        std::mt19937_64 rng(split_seed(seed, static_cast<std::uint64_t>(sh)));
        const std::size_t lo = sh * shard, hi = std::min(N, lo + shard);
        Vector<double> eta(2 * n);
        for (std::size_t it = lo; it < hi; ++it) {
            double w = M;
            for (int m = 0; m < n; ++m) {
                const ModeSampler& s = samplers[m];
                const double r = unit_uniform(rng) * s.M;
                std::size_t c = std::upper_bound(s.cdf.begin(), s.cdf.end(), r) - s.cdf.begin();
                if (c >= s.cdf.size()) c = s.cdf.size() - 1;
                const double ju = unit_uniform(rng) - 0.5, jv = unit_uniform(rng) - 0.5;
                eta[m] = s.u[c] + s.width * ju;
                eta[n + m] = s.v[c] + s.width * jv;
                w *= s.sign[c];
            }
            const Vector<double> out = clifford_transform(eta, action, d);
            long idx = 0;
            for (int i = 0; i < k; ++i) {
                // point masses of ideal inputs sit on bin edges; keep them in the upper bin
                long b = static_cast<long>(std::floor(out[modes[i]] / width + 1e-9));
                b = std::clamp(b, 0L, nb - 1);
                idx = idx * nb + b;
            }
            s1[idx] += w;
            s2[idx] += w * w;
        }
        sum[sh] = std::move(s1);
        sum2[sh] = std::move(s2);
    });

    EstimateResult res;
    res.M = M;
    res.N = N;
    res.bin_width = width;
    res.measured_modes = modes;
    std::vector<double> t1(total_bins, 0.0), t2(total_bins, 0.0);
    for (std::size_t sh = 0; sh < shards; ++sh)
        for (long b = 0; b < total_bins; ++b) {
            t1[b] += sum[sh][b];
            t2[b] += sum2[sh][b];
        }
    for (long b = 0; b < total_bins; ++b) {
        EstimateBin bin;
        long rem = b;
        bin.index.assign(k, 0);
        bin.centre.assign(k, 0.0);
        for (int i = k - 1; i >= 0; --i) {
            bin.index[i] = rem % nb;
            rem /= nb;
            bin.centre[i] = (bin.index[i] + 0.5) * width;
        }
        const double mean = t1[b] / static_cast<double>(N);
        const double var = std::max(0.0, t2[b] / static_cast<double>(N) - mean * mean);
        bin.probability = mean;
        bin.stderr_ = std::sqrt(var / static_cast<double>(N));
        res.bins.push_back(std::move(bin));
    }
    return res;
}

std::vector<double> modular_position_probabilities(const GaussianSum& psi, int d, double bin_width)
{
    const double ell = GKPParameters::make(d).ell, period = d * ell;
    const long nb = static_cast<long>(std::ceil(period / bin_width - 1e-9));
    double xmin = 1e300, xmax = -1e300;
    for (const auto& t : psi.terms()) {
        const double c = t.b.real() / t.a.real(), w = 1 / std::sqrt(t.a.real());
        xmin = std::min(xmin, c - 12 * w);
        xmax = std::max(xmax, c + 12 * w);
    }
    const long jlo = static_cast<long>(std::floor(xmin / period)) - 1;
    const long jhi = static_cast<long>(std::ceil(xmax / period)) + 1;
    const double norm = psi.norm2();
    const int sub = 64;
    std::vector<double> out(nb, 0.0);
    for (long b = 0; b < nb; ++b) {
        const double lo = b * bin_width, hi = std::min(period, lo + bin_width);
        const double h = (hi - lo) / sub;
        double acc = 0;
        for (int s = 0; s < sub; ++s) {
            const double u = lo + (s + 0.5) * h;
            for (long j = jlo; j <= jhi; ++j) acc += std::norm(psi(u + j * period));
        }
        out[b] = acc * h / norm;
    }
    return out;
}

}  // namespace gkpsim
