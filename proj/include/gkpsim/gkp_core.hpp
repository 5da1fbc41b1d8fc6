#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "gkpsim/exact_linalg.hpp"

namespace gkpsim {

using cdouble = std::complex<double>;

struct GKPParameters {
    int d = 2;
    double ell = 0;  // sqrt(2 pi / d)
    int D = 4;       // phase modulus: d for odd d, 2d for even d

    static GKPParameters make(int d);
};

double delta_from_db(double db);
double db_from_delta(double delta);
// Accepts "12dB", "12 dB" or a bare squeezing parameter "0.25".
double parse_delta(const std::string& text);

// Printed realistic codeword, unnormalized, ell and the comb period taken from params.
cdouble realistic_wavefunction(double x, int j, const GKPParameters& params, double delta);

// Sum of complex Gaussians exp(-a x^2/2 + b x + c), Re a > 0.
struct GaussTerm {
    cdouble a, b, c;
};

class GaussianSum {
public:
    GaussianSum() = default;
    explicit GaussianSum(std::vector<GaussTerm> terms);

    cdouble operator()(double x) const;
    const std::vector<GaussTerm>& terms() const { return terms_; }

    GaussianSum shear(double s) const;
    GaussianSum squeeze(double s) const;
    GaussianSum fourier() const;
    // translation by +(vq, vp)
    GaussianSum displace(double vq, double vp) const;
    // U with U^dag r U = S r, any real 2x2 S with det 1
    GaussianSum symplectic(const Matrix<double>& S) const;
    GaussianSum scaled(cdouble factor) const;
    GaussianSum operator+(const GaussianSum& other) const;

    double norm2() const;
    cdouble inner(const GaussianSum& other) const;  // <this|other>

    void prune(double rel_tol = 1e-18);

private:
    std::vector<GaussTerm> terms_;
    // terms sorted by centre of |term|, used for fast evaluation
    std::vector<double> centres_;
    double max_width_ = 0;
    void index();
};

// d x d logical state produced by a CV-to-DV map.
struct LogicalDensityMatrix {
    int d = 2;
    Matrix<cdouble> rho;

    static LogicalDensityMatrix pure(const std::vector<cdouble>& psi);
    bool valid(double tol = 1e-8) const;
};

enum class RealisticForm {
    Envelope,      // Gaussian envelope times comb of Gaussians, the printed codeword
    PeakWeighted,  // each peak weighted by the envelope at its centre
};

struct RealisticGKPState {
    int d = 2;
    double delta = 0.1;
    std::vector<cdouble> amplitudes{1.0};  // coefficient per logical label
    RealisticForm form = RealisticForm::Envelope;

    GaussianSum gaussian_sum() const;
};

GaussianSum vacuum_state();

// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1> with realistic d=2 codewords.
RealisticGKPState gkp_theta_family(double delta, double theta, double phi);

template <class T>
struct BasicGaussianOperation {
    RationalMatrix S;
    Vector<T> c;

    int modes() const { return static_cast<int>(S.rows()) / 2; }
};

using GaussianOperation = BasicGaussianOperation<double>;
using ExactGaussianOperation = BasicGaussianOperation<Rational>;

GaussianOperation make_operation(const RationalMatrix& S, const Vector<double>& c);
GaussianOperation identity_operation(int n);

// Heisenberg composition: `first` acts before `second`.
template <class T>
BasicGaussianOperation<T> compose(const BasicGaussianOperation<T>& first, const BasicGaussianOperation<T>& second)
{
    BasicGaussianOperation<T> out;
    out.S = second.S * first.S;
    Matrix<T> s2 = convert_matrix<T>(second.S);
    out.c = s2 * first.c + second.c;
    return out;
}

// Fold displacements to the right of all symplectics: the running total is
// kept as (S, w) with c = S w, and each new displacement enters as S^-1 c.
template <class T>
BasicGaussianOperation<T> pushthrough(const std::vector<BasicGaussianOperation<T>>& ops)
{
    if (ops.empty()) throw DimensionError("pushthrough of an empty sequence");
    const int n2 = static_cast<int>(ops.front().S.rows());
    RationalMatrix S = RationalMatrix::Identity(n2, n2);
    Vector<T> w = Vector<T>::Zero(n2);
    for (const auto& op : ops) {
        if (op.S.rows() != n2 || op.c.size() != n2) throw DimensionError("pushthrough: mode count mismatch");
        S = (op.S * S).eval();
        Matrix<T> sinv = convert_matrix<T>(symplectic_inverse(S));
        w += sinv * op.c;
    }
    BasicGaussianOperation<T> out;
    out.S = S;
    out.c = convert_matrix<T>(S) * w;
    return out;
}

struct Iwasawa {
    double kappa = 0;  // shear
    double s = 1;      // squeeze
    double theta = 0;  // rotation in [0, 2 pi)
};

Iwasawa iwasawa_decompose(const Matrix<double>& S, double tol = 1e-9);
Matrix<double> shear_matrix(double s);
Matrix<double> squeeze_matrix(double s);
Matrix<double> rotation_matrix(double theta);
Matrix<double> fourier_matrix();

enum class GateKind { Fourier, Phase, Shear, Squeeze, Sum, PauliX, PauliZ, Displacement, Symplectic };

struct NamedGate {
    GateKind kind = GateKind::Fourier;
    std::vector<int> targets;
    Rational parameter = 0;      // shear/squeeze value
    Vector<double> displacement;  // full 2n vector for Displacement
    RationalMatrix matrix;       // full 2n x 2n for Symplectic
};

// Phase maps to Shear(1); PauliX/PauliZ to a displacement by ell in q/p.
GaussianOperation named_gate_matrix(const NamedGate& gate, int n, int d = 2);

enum class InputKind { Ideal, Realistic, Vacuum };

struct InputSpec {
    InputKind kind = InputKind::Ideal;
    int label = 0;
    double delta = 0;
    std::vector<cdouble> amplitudes;  // realistic only; defaults to |label>
};

// Heisenberg-Weyl observable on qudits: exponent vector (x..x, z..z)
struct HWSpec {
    std::vector<long> x, z;
};

struct CircuitStep {
    bool is_measurement = false;
    NamedGate gate;
    HWSpec observable;
};

enum class MeasurementKind { Position, ModularPosition, HeisenbergWeyl, None };

struct MeasurementSpec {
    MeasurementKind kind = MeasurementKind::None;
    std::vector<int> modes;
    std::vector<HWSpec> observables;
};

struct CircuitDescription {
    int n = 1;
    int d = 2;
    std::vector<InputSpec> inputs;
    std::vector<CircuitStep> steps;
    MeasurementSpec measurement;

    // All non-measurement steps folded into one operation.
    GaussianOperation total_operation() const;
};

CircuitDescription parse_circuit(const std::string& text);
CircuitDescription load_circuit(const std::string& path);

}  // namespace gkpsim
