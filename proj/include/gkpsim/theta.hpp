#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "gkpsim/gkp_core.hpp"

namespace gkpsim {

struct ThetaArgs {
    cdouble z;
    cdouble tau;
    double truncation_tol = 1e-17;
};

cdouble jacobi_theta(const ThetaArgs& args);
cdouble jacobi_theta(cdouble z, cdouble tau, double tol = 1e-17);

// Lattice sum over Z^g, truncated on the ellipsoid pi m^T Im(Gamma) m <= -log(tol).
cdouble siegel_theta(const Vector<cdouble>& z, const Matrix<cdouble>& gamma, double tol = 1e-17);

// Angle given in exact form.
struct AngleSpec {
    enum class Form { Cotangent, PiFraction, Irrational };
    Form form = Form::Cotangent;
    Rational value;  // cot(theta) or theta/pi

    static AngleSpec cotangent(const Rational& c) { return {Form::Cotangent, c}; }
    static AngleSpec pi_fraction(const Rational& f) { return {Form::PiFraction, f}; }
    static AngleSpec irrational() { return {Form::Irrational, Rational(0)}; }
};

struct AngleClass {
    enum class Variant { RationalCotangent, PiMultiple, IrrationalCotangent };
    Variant variant = Variant::IrrationalCotangent;
    BigInt u = 0, v = 1;  // cot = u/v, lowest terms, v > 0
    BigInt k = 0;         // theta = k pi

    double theta() const;  // in (0, pi) for RationalCotangent
};

AngleClass classify_angle(const AngleSpec& spec);

struct CombSpacing {
    enum class Source { Formula, Numeric };
    double spacing = 0;
    Source source = Source::Formula;
};

// Spacing of the rotated ideal comb in the rotated quadrature.
// Odd v uses sqrt(pi) sin(theta)/v, PiMultiple gives 2 sqrt(pi); an even v
// has no closed form here and is measured with rotated_pdf_numeric.
CombSpacing rotated_comb_spacing(const AngleClass& cls, double eps_reg = 1e-3);

double rotated_pdf_numeric(double x, const AngleClass& cls, double eps_reg = 1e-3);

struct PeakScan {
    std::vector<double> peaks;  // x positions
    double spacing = 0;
    double spacing_spread = 0;  // max deviation of consecutive gaps from spacing
};
// Regularised density peaks over the z-window [z_lo, z_hi], where x = -z sqrt(pi) sin(theta).
// The density has period 1 in z, so the default window always holds two interior peaks.
PeakScan detect_rotated_peaks(const AngleClass& cls, double eps_reg = 1e-3, double z_lo = -0.6,
                              double z_hi = 1.6, int threads = 1);

bool in_Q2(const Rational& q);
bool in_RSp(const RationalMatrix& S);
bool in_DSp(const RationalMatrix& S);

struct Window1D {
    double lo, hi;
};
std::vector<double> single_mode_outcome_sample(const GaussianOperation& op, std::size_t count,
                                               Window1D window, std::uint64_t seed);

}  // namespace gkpsim
