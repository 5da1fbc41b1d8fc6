#include "gkpsim/gkp_core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "json.hpp"

#include "gkpsim/theta.hpp"

namespace gkpsim {

namespace {

constexpr double kPi = std::numbers::pi;

double term_log_peak(const GaussTerm& t)
{
    // max over real x of Re(-a x^2/2 + b x + c)
    const double ar = t.a.real(), br = t.b.real();
    return br * br / (2 * ar) + t.c.real();
}

double term_centre(const GaussTerm& t) { return t.b.real() / t.a.real(); }

}  // namespace

GKPParameters GKPParameters::make(int d)
{
    if (d < 2) throw DimensionError("qudit dimension must be at least 2");
    GKPParameters p;
    p.d = d;
    p.ell = std::sqrt(2 * kPi / d);
    p.D = (d % 2 == 1) ? d : 2 * d;
    return p;
}

double delta_from_db(double db) { return std::pow(10.0, -db / 20.0); }
double db_from_delta(double delta) { return -10.0 * std::log10(delta * delta); }

double parse_delta(const std::string& text)
{
    std::string s = text;
    s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
    bool db = false;
    if (s.size() > 2) {
        std::string tail = s.substr(s.size() - 2);
        std::transform(tail.begin(), tail.end(), tail.begin(), ::tolower);
        if (tail == "db") {
            db = true;
            s.resize(s.size() - 2);
        }
    }
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ValidationError("squeezing", "cannot parse squeezing value '" + text + "'");
    }
    if (used != s.size()) throw ValidationError("squeezing", "cannot parse squeezing value '" + text + "'");
    const double delta = db ? delta_from_db(v) : v;
    if (!(delta > 0) || !std::isfinite(delta)) throw ValidationError("delta_positive", "squeezing parameter must be > 0");
    return delta;
}

cdouble realistic_wavefunction(double x, int j, const GKPParameters& params, double delta)
{
    if (!(delta > 0)) throw ConvergenceError("realistic codeword needs delta > 0");
    const double d = params.d, ell = params.ell;
    const double env = std::exp(-x * x * delta * delta / 2);
    const cdouble th = jacobi_theta(cdouble(x / (d * ell) - j / d, 0), cdouble(0, delta * delta / d));
    return env * th / (std::sqrt(2 * kPi) * delta);
}

GaussianSum::GaussianSum(std::vector<GaussTerm> terms) : terms_(std::move(terms)) { index(); }

void GaussianSum::index()
{
    std::sort(terms_.begin(), terms_.end(),
              [](const GaussTerm& x, const GaussTerm& y) { return term_centre(x) < term_centre(y); });
    centres_.resize(terms_.size());
    max_width_ = 0;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (!(terms_[i].a.real() > 0)) throw ConvergenceError("Gaussian term is not normalizable");
        centres_[i] = term_centre(terms_[i]);
        max_width_ = std::max(max_width_, 1.0 / std::sqrt(terms_[i].a.real()));
    }
}

cdouble GaussianSum::operator()(double x) const
{
    // |term| <= exp(peak) exp(-(x - centre)^2 / (2 w^2)); skip terms beyond 10 widths
    const double reach = 10.0 * max_width_;
    auto lo = std::lower_bound(centres_.begin(), centres_.end(), x - reach);
    auto hi = std::upper_bound(centres_.begin(), centres_.end(), x + reach);
    cdouble acc = 0;
    for (auto it = lo; it != hi; ++it) {
        const GaussTerm& t = terms_[it - centres_.begin()];
        acc += std::exp(-0.5 * t.a * x * x + t.b * x + t.c);
    }
    return acc;
}

GaussianSum GaussianSum::shear(double s) const
{
    std::vector<GaussTerm> out = terms_;
    for (auto& t : out) t.a -= cdouble(0, s);
    return GaussianSum(std::move(out));
}

GaussianSum GaussianSum::squeeze(double s) const
{
    if (s == 0) throw ValidationError("squeeze_nonzero", "squeeze parameter must be nonzero");
    std::vector<GaussTerm> out = terms_;
    for (auto& t : out) {
        t.a /= s * s;
        t.b /= s;
        t.c -= 0.5 * std::log(std::abs(s));
    }
    return GaussianSum(std::move(out));
}

GaussianSum GaussianSum::fourier() const
{
    std::vector<GaussTerm> out = terms_;
    for (auto& t : out) {
        const cdouble a = t.a, b = t.b;
        t.a = 1.0 / a;
        t.b = cdouble(0, -1) * b / a;
        t.c += b * b / (2.0 * a) - 0.5 * std::log(a);
    }
    return GaussianSum(std::move(out));
}

GaussianSum GaussianSum::displace(double vq, double vp) const
{
    std::vector<GaussTerm> out = terms_;
    for (auto& t : out) {
        const cdouble a = t.a, b = t.b;
        t.b = b + a * vq + cdouble(0, vp);
        t.c += -0.5 * a * vq * vq - b * vq - cdouble(0, 0.5 * vq * vp);
    }
    return GaussianSum(std::move(out));
}

GaussianSum GaussianSum::symplectic(const Matrix<double>& S) const
{
    if (S.rows() != 2 || S.cols() != 2) throw DimensionError("single-mode symplectic must be 2x2");
    const double A = S(0, 0), B = S(0, 1), C = S(1, 0), D = S(1, 1);
    if (std::abs(A * D - B * C - 1) > 1e-9) throw NotSymplecticError("2x2 matrix does not have unit determinant");
    if (std::abs(B) > 1e-12) return shear(A / B).fourier().squeeze(B).shear(D / B);
    return squeeze(A).shear(C / A);
}

GaussianSum GaussianSum::scaled(cdouble factor) const
{
    if (factor == cdouble(0)) return GaussianSum();
    std::vector<GaussTerm> out = terms_;
    const cdouble lf = std::log(factor);
    for (auto& t : out) t.c += lf;
    return GaussianSum(std::move(out));
}

GaussianSum GaussianSum::operator+(const GaussianSum& other) const
{
    std::vector<GaussTerm> out = terms_;
    out.insert(out.end(), other.terms_.begin(), other.terms_.end());
    return GaussianSum(std::move(out));
}

cdouble GaussianSum::inner(const GaussianSum& other) const
{
    cdouble acc = 0;
    for (const auto& s : terms_) {
        for (const auto& t : other.terms_) {
            const cdouble A = std::conj(s.a) + t.a;
            const cdouble B = std::conj(s.b) + t.b;
            const cdouble C = std::conj(s.c) + t.c;
            acc += std::sqrt(2 * kPi / A) * std::exp(B * B / (2.0 * A) + C);
        }
    }
    return acc;
}

double GaussianSum::norm2() const { return inner(*this).real(); }

void GaussianSum::prune(double rel_tol)
{
    if (terms_.empty()) return;
    double top = -1e300;
    for (const auto& t : terms_) top = std::max(top, term_log_peak(t));
    const double cut = top + std::log(rel_tol);
    std::vector<GaussTerm> kept;
    for (const auto& t : terms_)
        if (term_log_peak(t) >= cut) kept.push_back(t);
    terms_ = std::move(kept);
    index();
}

GaussianSum RealisticGKPState::gaussian_sum() const
{
    if (!(delta > 0)) throw ValidationError("delta_positive", "squeezing parameter must be > 0");
    const GKPParameters p = GKPParameters::make(d);
    const double d2 = delta * delta;
    // prefactor that matches realistic_wavefunction after Poisson summation
    const double lpref = std::log(d * p.ell / (2 * kPi * d2));
    // envelope exp(-d2 x^2/2) drops below 1e-20 beyond |x| = sqrt(92)/delta
    const double xmax = std::sqrt(92.0) / delta + 10 * delta;
    std::vector<GaussTerm> terms;
    for (int j = 0; j < d && j < static_cast<int>(amplitudes.size()); ++j) {
        const cdouble amp = amplitudes[j];
        if (amp == cdouble(0)) continue;
        const cdouble la = std::log(amp);
        const long kmax = static_cast<long>(std::ceil(xmax / (d * p.ell))) + 1;
        for (long k = -kmax; k <= kmax; ++k) {
            const double xk = (j + static_cast<double>(d) * k) * p.ell;
            GaussTerm t;
            if (form == RealisticForm::Envelope) {
                t.a = d2 + 1.0 / d2;
                t.b = xk / d2;
                t.c = -xk * xk / (2 * d2) + lpref + la;
            } else {
                t.a = 1.0 / d2;
                t.b = xk / d2;
                t.c = -xk * xk / (2 * d2) - d2 * xk * xk / 2 + lpref + la;
            }
            terms.push_back(t);
        }
    }
    GaussianSum out(std::move(terms));
    out.prune(1e-20);
    return out;
}

LogicalDensityMatrix LogicalDensityMatrix::pure(const std::vector<cdouble>& psi)
{
    LogicalDensityMatrix out;
    out.d = static_cast<int>(psi.size());
    Vector<cdouble> v(out.d);
    for (int i = 0; i < out.d; ++i) v[i] = psi[i];
    v /= v.norm();
    out.rho = v * v.adjoint();
    return out;
}

bool LogicalDensityMatrix::valid(double tol) const
{
    if (rho.rows() != d || rho.cols() != d) return false;
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) return false;
    if (std::abs(rho.trace() - 1.0) > tol) return false;
    Eigen::SelfAdjointEigenSolver<Matrix<cdouble>> es(rho);
    return es.eigenvalues().minCoeff() >= -tol;
}

GaussianSum vacuum_state() { return GaussianSum({GaussTerm{1.0, 0.0, -0.25 * std::log(kPi)}}); }

RealisticGKPState gkp_theta_family(double delta, double theta, double phi)
{
    RealisticGKPState st;
    st.d = 2;
    st.delta = delta;
    st.amplitudes = {std::cos(theta / 2), std::sin(theta / 2) * std::exp(cdouble(0, phi))};
    return st;
}

GaussianOperation make_operation(const RationalMatrix& S, const Vector<double>& c)
{
    if (S.rows() != S.cols() || S.rows() % 2 != 0 || c.size() != S.rows())
        throw DimensionError("operation needs a 2n x 2n matrix and a 2n displacement");
    if (!is_symplectic(S)) throw NotSymplecticError("matrix does not satisfy S^T Omega S = Omega");
    return {S, c};
}

GaussianOperation identity_operation(int n)
{
    return {RationalMatrix::Identity(2 * n, 2 * n), Vector<double>::Zero(2 * n)};
}

Iwasawa iwasawa_decompose(const Matrix<double>& S, double tol)
{
    if (S.rows() != 2 || S.cols() != 2) throw DimensionError("iwasawa_decompose expects a 2x2 matrix");
    const double A = S(0, 0), B = S(0, 1), C = S(1, 0), D = S(1, 1);
    if (std::abs(A * D - B * C - 1) > tol) throw NotSymplecticError("det S differs from 1 beyond tolerance");
    Iwasawa out;
    out.s = std::hypot(A, B);
    double th = std::atan2(B, A);
    if (th < 0) th += 2 * kPi;
    if (th >= 2 * kPi) th -= 2 * kPi;
    out.theta = th;
    out.kappa = (C * std::cos(th) + D * std::sin(th)) / out.s;
    return out;
}

Matrix<double> shear_matrix(double s)
{
    Matrix<double> m(2, 2);
    m << 1, 0, s, 1;
    return m;
}

Matrix<double> squeeze_matrix(double s)
{
    Matrix<double> m(2, 2);
    m << s, 0, 0, 1 / s;
    return m;
}

Matrix<double> rotation_matrix(double theta)
{
    Matrix<double> m(2, 2);
    m << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
    return m;
}

Matrix<double> fourier_matrix()
{
    Matrix<double> m(2, 2);
    m << 0, 1, -1, 0;
    return m;
}

GaussianOperation named_gate_matrix(const NamedGate& gate, int n, int d)
{
    if (n < 1) throw DimensionError("mode count must be positive");
    for (int t : gate.targets)
        if (t < 0 || t >= n) throw ValidationError("target_range", "gate target " + std::to_string(t) + " outside [0, n)");
    auto need = [&](std::size_t k) {
        if (gate.targets.size() != k)
            throw ValidationError("target_count", "gate expects " + std::to_string(k) + " target(s)");
    };
    GaussianOperation op = identity_operation(n);
    RationalMatrix& S = op.S;
    switch (gate.kind) {
        case GateKind::Fourier: {
            need(1);
            const int i = gate.targets[0];
            S(i, i) = 0;
            S(n + i, n + i) = 0;
            S(i, n + i) = 1;
            S(n + i, i) = -1;
            break;
        }
        case GateKind::Phase:
        case GateKind::Shear: {
            need(1);
            const int i = gate.targets[0];
            S(n + i, i) = gate.kind == GateKind::Phase ? Rational(1) : gate.parameter;
            break;
        }
        case GateKind::Squeeze: {
            need(1);
            if (gate.parameter == 0) throw ValidationError("squeeze_nonzero", "squeeze parameter must be nonzero");
            const int i = gate.targets[0];
            S(i, i) = gate.parameter;
            S(n + i, n + i) = Rational(1) / gate.parameter;
            break;
        }
        case GateKind::Sum: {
            need(2);
            const int c = gate.targets[0], t = gate.targets[1];
            if (c == t) throw ValidationError("target_distinct", "SUM control and target must differ");
            S(t, c) = 1;       // q_t -> q_t + q_c
            S(n + c, n + t) = -1;  // p_c -> p_c - p_t
            break;
        }
        case GateKind::PauliX:
        case GateKind::PauliZ: {
            need(1);
            const int i = gate.targets[0];
            op.c[gate.kind == GateKind::PauliX ? i : n + i] = GKPParameters::make(d).ell;
            break;
        }
        case GateKind::Displacement:
            if (gate.displacement.size() != 2 * n) throw DimensionError("displacement vector must have length 2n");
            op.c = gate.displacement;
            break;
        case GateKind::Symplectic:
            return make_operation(gate.matrix, Vector<double>::Zero(2 * n));
    }
    return op;
}

GaussianOperation CircuitDescription::total_operation() const
{
    std::vector<GaussianOperation> ops;
    for (const auto& step : steps)
        if (!step.is_measurement) ops.push_back(named_gate_matrix(step.gate, n, d));
    if (ops.empty()) return identity_operation(n);
    return pushthrough(ops);
}

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ParseError(where, what); }

const json& field(const json& obj, const char* name, const std::string& where)
{
    if (!obj.is_object() || !obj.contains(name)) fail(where, std::string("missing field '") + name + "'");
    return obj.at(name);
}

Rational rational_field(const json& v, const std::string& where)
{
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (!v.is_string()) fail(where, "rational must be a \"p/q\" string");
    try {
        return parse_rational(v.get<std::string>());
    } catch (const ValidationError& e) {
        fail(where, e.what());
    }
}

// decimal string, optionally times sqrt(pi): "1.5", "2*sqrt(pi)", "-1/2*sqrt(pi)"
double real_field(const json& v, const std::string& where)
{
    if (v.is_number()) return v.get<double>();
    if (!v.is_string()) fail(where, "real must be a decimal string");
    std::string s = v.get<std::string>();
    double scale = 1;
    const std::string tag = "sqrt(pi)";
    if (s.size() >= tag.size() && s.compare(s.size() - tag.size(), tag.size(), tag) == 0) {
        scale = std::sqrt(kPi);
        s.resize(s.size() - tag.size());
        if (!s.empty() && s.back() == '*') s.pop_back();
        if (s.empty() || s == "+") s = "1";
        if (s == "-") s = "-1";
        if (s.find('/') != std::string::npos) {
            try {
                return parse_rational(s).convert_to<double>() * scale;
            } catch (const ValidationError& e) {
                fail(where, e.what());
            }
        }
    }
    std::istringstream in(s);
    in.imbue(std::locale::classic());
    double x = 0;
    in >> x;
    if (in.fail() || !in.eof()) fail(where, "cannot parse real '" + v.get<std::string>() + "'");
    return x * scale;
}

int int_field(const json& v, const std::string& where)
{
    if (!v.is_number_integer()) fail(where, "expected integer");
    return v.get<int>();
}

std::vector<int> targets_field(const json& op, const std::string& where)
{
    const json& t = field(op, "targets", where);
    if (!t.is_array()) fail(where + ".targets", "expected array");
    std::vector<int> out;
    for (std::size_t i = 0; i < t.size(); ++i) out.push_back(int_field(t[i], where + ".targets[" + std::to_string(i) + "]"));
    return out;
}

HWSpec hw_field(const json& obj, int n, const std::string& where)
{
    HWSpec h;
    for (const char* key : {"x", "z"}) {
        const json& a = field(obj, key, where);
        if (!a.is_array() || static_cast<int>(a.size()) != n) fail(where + "." + key, "expected array of length modes");
        auto& dst = key[0] == 'x' ? h.x : h.z;
        for (std::size_t i = 0; i < a.size(); ++i) dst.push_back(int_field(a[i], where + "." + key));
    }
    return h;
}

}  // namespace

CircuitDescription parse_circuit(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail("document", std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) fail("document", "top level must be an object");
    const json& schema = field(doc, "schema", "document");
    if (!schema.is_string() || schema.get<std::string>() != "gkpsim-circuit/1")
        fail("schema", "unsupported schema version, expected \"gkpsim-circuit/1\"");
    if (doc.contains("ordering") && doc["ordering"] != "qqpp")
        fail("ordering", "only the (q..q, p..p) ordering \"qqpp\" is accepted");

    CircuitDescription c;
    c.n = int_field(field(doc, "modes", "document"), "modes");
    c.d = int_field(field(doc, "dimension", "document"), "dimension");
    if (c.n < 1) fail("modes", "must be positive");
    if (c.d < 2) fail("dimension", "must be at least 2");

    const json& inputs = field(doc, "inputs", "document");
    if (!inputs.is_array() || static_cast<int>(inputs.size()) != c.n) fail("inputs", "expected one input per mode");
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const std::string where = "inputs[" + std::to_string(i) + "]";
        const json& in = inputs[i];
        InputSpec spec;
        const json& kind = field(in, "state", where);
        if (!kind.is_string()) fail(where + ".state", "expected string");
        const std::string k = kind.get<std::string>();
        if (in.contains("label")) spec.label = int_field(in["label"], where + ".label");
        if (spec.label < 0 || spec.label >= c.d) fail(where + ".label", "logical label outside [0, d)");
        if (k == "ideal") {
            spec.kind = InputKind::Ideal;
        } else if (k == "vacuum") {
            spec.kind = InputKind::Vacuum;
        } else if (k == "realistic") {
            spec.kind = InputKind::Realistic;
            const json& dl = field(in, "delta", where);
            if (!dl.is_string()) fail(where + ".delta", "expected string such as \"0.25\" or \"12dB\"");
            try {
                spec.delta = parse_delta(dl.get<std::string>());
            } catch (const ValidationError& e) {
                fail(where + ".delta", e.what());
            }
            if (in.contains("amplitudes")) {
                const json& amps = in["amplitudes"];
                if (!amps.is_array() || static_cast<int>(amps.size()) != c.d)
                    fail(where + ".amplitudes", "expected d entries of [re, im]");
                for (std::size_t a = 0; a < amps.size(); ++a) {
                    const std::string w = where + ".amplitudes[" + std::to_string(a) + "]";
                    if (!amps[a].is_array() || amps[a].size() != 2) fail(w, "expected [re, im]");
                    spec.amplitudes.emplace_back(real_field(amps[a][0], w), real_field(amps[a][1], w));
                }
            } else {
                spec.amplitudes.assign(c.d, 0.0);
                spec.amplitudes[spec.label] = 1.0;
            }
        } else {
            fail(where + ".state", "unknown state '" + k + "'");
        }
        c.inputs.push_back(spec);
    }

    const json& ops = field(doc, "operations", "document");
    if (!ops.is_array()) fail("operations", "expected array");
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const std::string where = "operations[" + std::to_string(i) + "]";
        const json& op = ops[i];
        CircuitStep step;
        if (op.contains("measure")) {
            step.is_measurement = true;
            step.observable = hw_field(op["measure"], c.n, where + ".measure");
            c.steps.push_back(step);
            continue;
        }
        const json& g = field(op, "gate", where);
        if (!g.is_string()) fail(where + ".gate", "expected string");
        const std::string name = g.get<std::string>();
        NamedGate& gate = step.gate;
        if (name == "fourier") {
            gate.kind = GateKind::Fourier;
        } else if (name == "phase") {
            gate.kind = GateKind::Phase;
        } else if (name == "shear") {
            gate.kind = GateKind::Shear;
            gate.parameter = rational_field(field(op, "value", where), where + ".value");
        } else if (name == "squeeze") {
            gate.kind = GateKind::Squeeze;
            gate.parameter = rational_field(field(op, "value", where), where + ".value");
        } else if (name == "sum") {
            gate.kind = GateKind::Sum;
        } else if (name == "x") {
            gate.kind = GateKind::PauliX;
        } else if (name == "z") {
            gate.kind = GateKind::PauliZ;
        } else if (name == "displacement") {
            gate.kind = GateKind::Displacement;
            const json& v = field(op, "vector", where);
            if (!v.is_array() || static_cast<int>(v.size()) != 2 * c.n) fail(where + ".vector", "expected 2n reals");
            gate.displacement.resize(2 * c.n);
            for (int k = 0; k < 2 * c.n; ++k) gate.displacement[k] = real_field(v[k], where + ".vector");
        } else if (name == "symplectic") {
            gate.kind = GateKind::Symplectic;
            const json& m = field(op, "matrix", where);
            if (!m.is_array() || static_cast<int>(m.size()) != 2 * c.n) fail(where + ".matrix", "expected 2n rows");
            gate.matrix.resize(2 * c.n, 2 * c.n);
            for (int r = 0; r < 2 * c.n; ++r) {
                if (!m[r].is_array() || static_cast<int>(m[r].size()) != 2 * c.n)
                    fail(where + ".matrix", "expected 2n columns");
                for (int s = 0; s < 2 * c.n; ++s) gate.matrix(r, s) = rational_field(m[r][s], where + ".matrix");
            }
        } else {
            fail(where + ".gate", "unknown gate '" + name + "'");
        }
        if (gate.kind != GateKind::Displacement && gate.kind != GateKind::Symplectic)
            gate.targets = targets_field(op, where);
        named_gate_matrix(gate, c.n, c.d);  // validates targets and symplecticity
        c.steps.push_back(step);
    }

    if (doc.contains("measurement")) {
        const json& m = doc["measurement"];
        const std::string type = field(m, "type", "measurement").is_string() ? m["type"].get<std::string>() : "";
        if (type == "position" || type == "modular-position") {
            c.measurement.kind = type == "position" ? MeasurementKind::Position : MeasurementKind::ModularPosition;
            if (m.contains("modes")) {
                for (const auto& v : m["modes"]) {
                    const int k = int_field(v, "measurement.modes");
                    if (k < 0 || k >= c.n) fail("measurement.modes", "mode outside [0, n)");
                    c.measurement.modes.push_back(k);
                }
            } else {
                for (int k = 0; k < c.n; ++k) c.measurement.modes.push_back(k);
            }
        } else if (type == "hw") {
            c.measurement.kind = MeasurementKind::HeisenbergWeyl;
            const json& obs = field(m, "observables", "measurement");
            if (!obs.is_array()) fail("measurement.observables", "expected array");
            for (std::size_t i = 0; i < obs.size(); ++i)
                c.measurement.observables.push_back(hw_field(obs[i], c.n, "measurement.observables[" + std::to_string(i) + "]"));
        } else {
            fail("measurement.type", "expected position, modular-position or hw");
        }
    }
    return c;
}

CircuitDescription load_circuit(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open circuit file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_circuit(buf.str());
}

}  // namespace gkpsim
