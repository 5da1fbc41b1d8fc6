#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "gkpsim/gkp_core.hpp"

namespace gkpsim {

using Wavefunction = std::function<cdouble(double)>;

// <l_GKP| D(s) |psi> over the ideal comb x_m = (l + d m) ell, |m| <= M.
// If `tail` is given it receives the largest |psi| at the two outermost comb
// points, a proxy for the truncation error.
cdouble ec_overlap(const Wavefunction& psi, double sx, double sz, int l, int d, int M, double* tail = nullptr);

struct SSDConfig {
    int zak_grid = 64;
    int comb_truncation = 0;  // 0: chosen from the state's extent
};

// Comb truncation covering every term of psi.
int ssd_truncation(const GaussianSum& psi, int d);

LogicalDensityMatrix stabilizer_ssd(const GaussianSum& psi, int d, const SSDConfig& cfg = {});
LogicalDensityMatrix stabilizer_ssd(const Wavefunction& psi, int d, const SSDConfig& cfg);

struct BlochVector {
    double x = 0, y = 0, z = 0;
    double norm() const;
};

BlochVector bloch_vector(const LogicalDensityMatrix& rho);

struct ROMReport {
    BlochVector bloch;
    double rom = 0;
    double fidelity_to_T = 0;
    bool distillable = false;  // rom > R*, false when no threshold is given
};

// `threshold` is the distillation threshold R*, supplied by the caller.
ROMReport rom(const LogicalDensityMatrix& rho, std::optional<double> threshold = std::nullopt);

struct ROMSweepCell {
    double theta = 0, delta = 0;
    ROMReport report;
};

struct ROMSweep {
    std::vector<double> thetas, deltas;
    std::vector<ROMSweepCell> cells;  // delta-major
    const ROMSweepCell& at(std::size_t idelta, std::size_t itheta) const { return cells[idelta * thetas.size() + itheta]; }
};

ROMSweep rom_sweep(const std::vector<double>& deltas, const std::vector<double>& thetas, double phi,
                   const SSDConfig& cfg = {}, std::optional<double> threshold = std::nullopt, int threads = 1);

// Apply a single-mode Gaussian to psi, then project with the stabilizer SSD.
LogicalDensityMatrix pre_unitary_map(const GaussianSum& psi, const GaussianOperation& op, int d, const SSDConfig& cfg = {});

LogicalDensityMatrix strange_state();

}  // namespace gkpsim
