#include "gkpsim/resource.hpp"

#include <cmath>
#include <numbers>
#include <thread>

namespace gkpsim {

namespace {

constexpr double kPi = std::numbers::pi;

struct ZakPatch {
    double lo = 0, width = 0;
    int G = 0;
    double at(int i) const { return lo + (i + 0.5) * width / G; }
};

ZakPatch patch_for(int d, int G)
{
    const double ell = GKPParameters::make(d).ell;
    ZakPatch p;
    p.G = G;
    p.width = ell;
    // centred on the lattice so that small shifts are corrected to the nearest point
    p.lo = -ell / 2;
    return p;
}

// c_l(s) on the G x G patch for every l, laid out [l][ix * G + iz].
std::vector<std::vector<cdouble>> zak_coefficients(const Wavefunction& psi, int d, int G, int M)
{
    const double ell = GKPParameters::make(d).ell;
    const ZakPatch p = patch_for(d, G);
    const int W = 2 * M + 1;
    std::vector<std::vector<cdouble>> out(d, std::vector<cdouble>(static_cast<std::size_t>(G) * G));
    std::vector<cdouble> vals(W);
    for (int l = 0; l < d; ++l) {
        std::vector<double> xm(W);
        for (int m = -M; m <= M; ++m) xm[m + M] = (l + static_cast<double>(d) * m) * ell;
        // e^{i sz x_m}, shared by all sx
        std::vector<cdouble> ph(static_cast<std::size_t>(G) * W);
        for (int iz = 0; iz < G; ++iz)
            for (int k = 0; k < W; ++k) ph[iz * W + k] = std::exp(cdouble(0, p.at(iz) * xm[k]));
        for (int ix = 0; ix < G; ++ix) {
            const double sx = p.at(ix);
            for (int k = 0; k < W; ++k) vals[k] = psi(xm[k] - sx);
            for (int iz = 0; iz < G; ++iz) {
                const double sz = p.at(iz);
                cdouble acc = 0;
                for (int k = 0; k < W; ++k) acc += ph[iz * W + k] * vals[k];
                out[l][ix * G + iz] = std::exp(cdouble(0, -sx * sz / 2)) * acc;
            }
        }
    }
    return out;
}

LogicalDensityMatrix density_from_coefficients(const std::vector<std::vector<cdouble>>& c, int d)
{
    LogicalDensityMatrix r;
    r.d = d;
    r.rho = Matrix<cdouble>::Zero(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) {
            cdouble acc = 0;
            for (std::size_t i = 0; i < c[a].size(); ++i) acc += c[a][i] * std::conj(c[b][i]);
            r.rho(a, b) = acc;
            r.rho(b, a) = std::conj(acc);
        }
    const double tr = r.rho.trace().real();
    if (!(tr > 1e-12)) throw ValidationError("degenerate", "projected state has vanishing trace");
    r.rho /= tr;
    return r;
}

void check_config(const SSDConfig& cfg)
{
    if (cfg.zak_grid < 16) throw ValidationError("zak_grid", "Zak patch grid needs at least 16 points per axis");
    if (cfg.comb_truncation < 0) throw ValidationError("comb_truncation", "comb truncation must be nonnegative");
}

}  // namespace

cdouble ec_overlap(const Wavefunction& psi, double sx, double sz, int l, int d, int M, double* tail)
{
    const double ell = GKPParameters::make(d).ell;
    cdouble acc = 0;
    for (int m = -M; m <= M; ++m) {
        const double x = (l + static_cast<double>(d) * m) * ell;
        acc += std::exp(cdouble(0, sz * x)) * psi(x - sx);
    }
    if (tail) {
        const double xl = (l - static_cast<double>(d) * M) * ell, xh = (l + static_cast<double>(d) * M) * ell;
        *tail = std::max(std::abs(psi(xl - sx)), std::abs(psi(xh - sx)));
    }
    return std::exp(cdouble(0, -sx * sz / 2)) * acc;
}

int ssd_truncation(const GaussianSum& psi, int d)
{
    const double ell = GKPParameters::make(d).ell;
    double reach = 0;
    for (const auto& t : psi.terms()) {
        const double centre = t.b.real() / t.a.real(), width = 1 / std::sqrt(t.a.real());
        reach = std::max(reach, std::abs(centre) + 10 * width);
    }
    return static_cast<int>(std::ceil(reach / (d * ell))) + 2;
}

LogicalDensityMatrix stabilizer_ssd(const Wavefunction& psi, int d, const SSDConfig& cfg)
{
    check_config(cfg);
    if (cfg.comb_truncation == 0) throw ValidationError("comb_truncation", "a callable wavefunction needs an explicit comb truncation");
    return density_from_coefficients(zak_coefficients(psi, d, cfg.zak_grid, cfg.comb_truncation), d);
}

LogicalDensityMatrix stabilizer_ssd(const GaussianSum& psi, int d, const SSDConfig& cfg)
{
    check_config(cfg);
    SSDConfig c = cfg;
    if (c.comb_truncation == 0) c.comb_truncation = ssd_truncation(psi, d);
    return stabilizer_ssd(Wavefunction([&](double x) { return psi(x); }), d, c);
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

BlochVector bloch_vector(const LogicalDensityMatrix& rho)
{
    if (rho.d != 2) throw ValidationError("dimension", "Bloch vectors are defined for d = 2");
    BlochVector b;
    b.x = 2 * rho.rho(0, 1).real();
    b.y = -2 * rho.rho(0, 1).imag();
    b.z = (rho.rho(0, 0) - rho.rho(1, 1)).real();
    return b;
}

ROMReport rom(const LogicalDensityMatrix& rho, std::optional<double> threshold)
{
    ROMReport r;
    r.bloch = bloch_vector(rho);
    r.rom = std::abs(r.bloch.x) + std::abs(r.bloch.y) + std::abs(r.bloch.z);
    // T state: cos(2 beta) = 1/sqrt(3), phase pi/4, Bloch direction (1,1,1)/sqrt(3)
    const double s3 = 1 / std::sqrt(3.0);
    r.fidelity_to_T = 0.5 * (1 + s3 * (r.bloch.x + r.bloch.y + r.bloch.z));
    r.distillable = threshold && r.rom > *threshold;
    return r;
}

ROMSweep rom_sweep(const std::vector<double>& deltas, const std::vector<double>& thetas, double phi,
                   const SSDConfig& cfg, std::optional<double> threshold, int threads)
{
    if (deltas.empty() || thetas.empty()) throw ValidationError("nonempty_grid", "sweep grids must be nonempty");
    check_config(cfg);
    for (double dl : deltas)
        if (!(dl > 0)) throw ValidationError("delta_positive", "sweep deltas must be positive");
    ROMSweep out;
    out.deltas = deltas;
    out.thetas = thetas;
    out.cells.resize(deltas.size() * thetas.size());
    const int nt = std::max(1, std::min<int>(threads, static_cast<int>(deltas.size())));
    auto work = [&](std::size_t idelta) {
        const double delta = deltas[idelta];
        // the projection is linear in the amplitudes: project each codeword once
        std::vector<std::vector<std::vector<cdouble>>> code(2);
        for (int j = 0; j < 2; ++j) {
            RealisticGKPState st;
            st.d = 2;
            st.delta = delta;
            st.amplitudes = {j == 0 ? 1.0 : 0.0, j == 1 ? 1.0 : 0.0};
            const GaussianSum g = st.gaussian_sum();
            const int M = cfg.comb_truncation ? cfg.comb_truncation : ssd_truncation(g, 2);
            code[j] = zak_coefficients([&](double x) { return g(x); }, 2, cfg.zak_grid, M);
        }
        for (std::size_t it = 0; it < thetas.size(); ++it) {
            const cdouble a = std::cos(thetas[it] / 2);
            const cdouble b = std::sin(thetas[it] / 2) * std::exp(cdouble(0, phi));
            std::vector<std::vector<cdouble>> c(2);
            for (int l = 0; l < 2; ++l) {
                c[l].resize(code[0][l].size());
                for (std::size_t i = 0; i < c[l].size(); ++i) c[l][i] = a * code[0][l][i] + b * code[1][l][i];
            }
            ROMSweepCell& cell = out.cells[idelta * thetas.size() + it];
            cell.theta = thetas[it];
            cell.delta = delta;
            cell.report = rom(density_from_coefficients(c, 2), threshold);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < deltas.size(); i += nt) work(i);
        });
    for (auto& th : pool) th.join();
    return out;
}

LogicalDensityMatrix pre_unitary_map(const GaussianSum& psi, const GaussianOperation& op, int d, const SSDConfig& cfg)
{
    if (op.modes() != 1) throw DimensionError("pre-unitary map takes a single-mode Gaussian");
    const GaussianSum moved = psi.symplectic(to_double(op.S)).displace(op.c[0], op.c[1]);
    return stabilizer_ssd(moved, d, cfg);
}

LogicalDensityMatrix strange_state()
{
    const double r = 1 / std::sqrt(2.0);
    return LogicalDensityMatrix::pure({0.0, r, r});
}

}  // namespace gkpsim
