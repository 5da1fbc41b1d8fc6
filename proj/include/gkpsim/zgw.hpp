#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "gkpsim/gkp_core.hpp"

namespace gkpsim {

// Discrete Wigner function of a single qudit, indexed W(tX, tZ), summing to one.
Matrix<double> gross_wigner(const Matrix<cdouble>& rho, int d);

// Ideal encoded state: point masses at (tX ell, tZ ell) on the torus [0, d ell)^2.
struct IdealZGW {
    int d = 3;
    double ell = 0;
    Matrix<double> weights;

    double min_weight() const { return weights.minCoeff(); }
    double one_norm() const { return weights.cwiseAbs().sum(); }
};

IdealZGW zgw_ideal(const LogicalDensityMatrix& rho);

// chi(m) = <psi| T(ell m) |psi> / <psi|psi> up to the ordering phase, m in [-M, M]^2.
struct ChiTable {
    int d = 3;
    double ell = 0;
    int M = 0;
    std::vector<cdouble> values;

    cdouble operator()(int mx, int mz) const { return values[(mx + M) * (2 * M + 1) + (mz + M)]; }
};

// ceil(12 / (ell delta)); the tails of chi are below 1e-10 from there on.
int zgw_truncation(double ell, double delta);
ChiTable characteristic_table(const GaussianSum& psi, int d, int M, int threads = 1);

struct ZGWGridSingleMode {
    int d = 3;
    int resolution = 0;
    double ell = 0;
    double offset = 0.5;  // 0.5: cell midpoints, 0: cell corners
    std::vector<double> values;  // values[iu * resolution + iv]
    double cell_area = 0;
    double max_imag = 0;  // largest imaginary residue seen

    double period() const { return d * ell; }
    double coord(long i) const { return (static_cast<double>(i) + offset) * period() / resolution; }
    double at(long iu, long iv) const;  // periodic indices
    double integral() const;
    double one_norm() const;
    double min_value() const;
};

ZGWGridSingleMode zgw_grid(const ChiTable& chi, int resolution, double offset = 0.5, int threads = 1);
cdouble zgw_point(const ChiTable& chi, double u, double v);

// Siegel-theta form of the realistic 0-logical state. The printed matrix
// belongs to RealisticForm::PeakWeighted; Envelope uses its own matrix.
Matrix<cdouble> zgw_gamma(int d, double delta, RealisticForm form);
double zgw_siegel(double u, double v, int d, double delta, RealisticForm form);

// Siegel path for the 0-logical state, characteristic-table path otherwise.
double zgw_realistic(double u, double v, const RealisticGKPState& state);

struct ProductZGW {
    std::vector<ZGWGridSingleMode> modes;
};

struct NegativityReport {
    std::vector<double> per_mode_M;
    double total_M = 1;
    bool standardisation_ok = true;
};

NegativityReport negativity(const ZGWGridSingleMode& grid, double standardisation_tol = 2e-3);
NegativityReport negativity(const ProductZGW& grids, double standardisation_tol = 2e-3);
NegativityReport negativity(const IdealZGW& ideal);

// Integer symplectic S with shift in units of ell/2 and a real displacement c:
// eta -> S eta - (ell/2) t_shift + c, reduced onto the torus.
struct CliffordAction {
    Matrix<long> S;
    std::vector<long> t_shift;
    Vector<double> c;
};

CliffordAction clifford_action(const GaussianOperation& op, int d);
Vector<double> clifford_transform(const Vector<double>& eta, const CliffordAction& action, int d);
// Point whose original value is the transformed value at eta.
Vector<double> clifford_pullback(const Vector<double>& eta, const CliffordAction& action, int d);

struct EstimatorConfig {
    double epsilon = 0.05;
    double delta = 0.05;
    std::size_t N = 0;      // 0 picks the bound
    double bin_width = 0;   // 0 picks ell / 64
    int resolution = 256;
    int threads = 1;
    bool enforce_bound = true;  // reject N below the Hoeffding bound
};

std::size_t hoeffding_samples(double epsilon, double delta, double M);

struct EstimateBin {
    std::vector<long> index;
    std::vector<double> centre;
    double probability = 0;
    double stderr_ = 0;
};

struct EstimateResult {
    std::vector<EstimateBin> bins;
    double M = 1;
    std::size_t N = 0;
    double bin_width = 0;
    std::vector<int> measured_modes;
};

EstimateResult estimate_pdf(const CircuitDescription& circuit, const EstimatorConfig& cfg, std::uint64_t seed);

// Probability of q mod (d ell) falling in each bin of width w over [0, d ell).
std::vector<double> modular_position_probabilities(const GaussianSum& psi, int d, double bin_width);

}  // namespace gkpsim
