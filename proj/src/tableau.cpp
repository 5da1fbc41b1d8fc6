#include "gkpsim/tableau.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

namespace gkpsim {

namespace {

long modp(long a, long m)
{
    long r = a % m;
    return r < 0 ? r + m : r;
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t uniform_below(std::uint64_t seed, std::uint64_t n)
{
    // rejection keeps the draw exactly uniform
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t s = seed;
    for (;;) {
        s = splitmix64(s);
        if (s < limit) return s % n;
    }
}

// g = s a + t b
long ext_gcd(long a, long b, long& s, long& t)
{
    long old_r = a, r = b, old_s = 1, cs = 0, old_t = 0, ct = 1;
    while (r != 0) {
        const long q = old_r / r;
        long tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        tmp = old_s - q * cs;
        old_s = cs;
        cs = tmp;
        tmp = old_t - q * ct;
        old_t = ct;
        ct = tmp;
    }
    s = old_s;
    t = old_t;
    return old_r;
}

}  // namespace

std::uint64_t split_seed(std::uint64_t master, std::uint64_t index)
{
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

StabilizerTableau::StabilizerTableau(int n, int d, std::vector<PauliElement> generators)
    : n_(n), d_(d), D_(d % 2 == 1 ? d : 2 * d), gens_(std::move(generators))
{
    if (n < 1 || d < 2) throw DimensionError("tableau needs n >= 1 and d >= 2");
    for (auto& g : gens_) {
        if (static_cast<int>(g.x.size()) != n || static_cast<int>(g.z.size()) != n)
            throw DimensionError("generator length differs from the qudit count");
        for (auto& v : g.x) v = modp(v, d);
        for (auto& v : g.z) v = modp(v, d);
        g.phase = modp(g.phase, D_);
    }
    canonicalize();
}

PauliElement StabilizerTableau::multiply(const PauliElement& a, const PauliElement& b) const
{
    PauliElement out;
    out.x.resize(n_);
    out.z.resize(n_);
    long zx = 0;
    for (int j = 0; j < n_; ++j) {
        out.x[j] = modp(a.x[j] + b.x[j], d_);
        out.z[j] = modp(a.z[j] + b.z[j], d_);
        zx += a.z[j] * b.x[j];
    }
    out.phase = modp(a.phase + b.phase + (D_ / d_) * modp(zx, d_), D_);
    return out;
}

PauliElement StabilizerTableau::inverse(const PauliElement& a) const
{
    PauliElement out;
    out.x.resize(n_);
    out.z.resize(n_);
    long zx = 0;
    for (int j = 0; j < n_; ++j) {
        out.x[j] = modp(-a.x[j], d_);
        out.z[j] = modp(-a.z[j], d_);
        zx += a.z[j] * a.x[j];
    }
    out.phase = modp(-a.phase + (D_ / d_) * modp(zx, d_), D_);
    return out;
}

PauliElement StabilizerTableau::power(const PauliElement& a, long k) const
{
    if (k < 0) return power(inverse(a), -k);
    PauliElement result;
    result.x.assign(n_, 0);
    result.z.assign(n_, 0);
    PauliElement base = a;
    while (k > 0) {
        if (k & 1) result = multiply(result, base);
        base = multiply(base, base);
        k >>= 1;
    }
    return result;
}

long StabilizerTableau::commutator(const PauliElement& a, const PauliElement& b) const
{
    long c = 0;
    for (int j = 0; j < n_; ++j) c += a.z[j] * b.x[j] - b.z[j] * a.x[j];
    return modp(c, d_);
}

PauliElement StabilizerTableau::from_observable(const HWObservable& obs) const
{
    if (static_cast<int>(obs.u.size()) != 2 * n_) throw DimensionError("observable exponent vector must have length 2n");
    PauliElement e;
    long xz = 0;
    for (int j = 0; j < n_; ++j) {
        e.x.push_back(modp(obs.u[j], d_));
        e.z.push_back(modp(obs.u[n_ + j], d_));
        xz += obs.u[j] * obs.u[n_ + j];
    }
    const long h = (d_ % 2 == 1) ? (d_ + 1) / 2 : 1;
    e.phase = modp(h * modp(xz, D_) + obs.phase, D_);
    return e;
}

void StabilizerTableau::canonicalize()
{
    auto col = [&](PauliElement& e, int j) -> long& { return j < n_ ? e.x[j] : e.z[j - n_]; };
    std::vector<PauliElement> rows = gens_;
    pivots_.clear();
    std::size_t r = 0;
    for (int j = 0; j < 2 * n_ && r < rows.size(); ++j) {
        for (std::size_t i = r + 1; i < rows.size(); ++i) {
            const long b = col(rows[i], j);
            if (b == 0) continue;
            const long a = col(rows[r], j);
            if (a == 0) {
                std::swap(rows[r], rows[i]);
                continue;
            }
            long s, t;
            const long g = ext_gcd(a, b, s, t);
            PauliElement nr = multiply(power(rows[r], s), power(rows[i], t));
            PauliElement ni = multiply(power(rows[r], -b / g), power(rows[i], a / g));
            rows[r] = std::move(nr);
            rows[i] = std::move(ni);
        }
        const long a = col(rows[r], j);
        if (a == 0) continue;
        const long g = std::gcd(a, static_cast<long>(d_));
        long w = 1;
        for (; w < d_; ++w)
            if (std::gcd(w, static_cast<long>(d_)) == 1 && modp(a * w, d_) == g) break;
        rows[r] = power(rows[r], w);
        for (std::size_t k = 0; k < r; ++k) {
            const long q = col(rows[k], j) / g;
            if (q != 0) rows[k] = multiply(rows[k], power(rows[r], -q));
        }
        if (g != 1) rows.push_back(power(rows[r], d_ / g));
        pivots_.push_back(j);
        ++r;
    }
    for (std::size_t i = r; i < rows.size(); ++i) {
        bool zero = true;
        for (int j = 0; j < 2 * n_; ++j) zero = zero && col(rows[i], j) == 0;
        if (!zero) throw std::logic_error("Howell reduction left a nonzero row");
        if (rows[i].phase != 0) throw ValidationError("no_phase_in_group", "generators multiply to a nontrivial phase");
    }
    rows.resize(r);
    gens_ = std::move(rows);
}

std::optional<long> StabilizerTableau::membership_phase(const PauliElement& target) const
{
    std::vector<long> rem(2 * n_);
    for (int j = 0; j < n_; ++j) {
        rem[j] = modp(target.x[j], d_);
        rem[n_ + j] = modp(target.z[j], d_);
    }
    PauliElement acc;
    acc.x.assign(n_, 0);
    acc.z.assign(n_, 0);
    for (std::size_t r = 0; r < gens_.size(); ++r) {
        const int j = pivots_[r];
        const PauliElement& g = gens_[r];
        const long piv = j < n_ ? g.x[j] : g.z[j - n_];
        if (rem[j] % piv != 0) return std::nullopt;
        const long q = rem[j] / piv;
        if (q == 0) continue;
        for (int k = 0; k < n_; ++k) {
            rem[k] = modp(rem[k] - q * g.x[k], d_);
            rem[n_ + k] = modp(rem[n_ + k] - q * g.z[k], d_);
        }
        acc = multiply(acc, power(g, q));
    }
    for (long v : rem)
        if (v != 0) return std::nullopt;
    return modp(target.phase - acc.phase, D_);
}

std::uint64_t StabilizerTableau::group_order_log_d() const
{
    // |group| = d^(2n) / prod(SNF diagonal of [G; d I])
    IntMatrix M = IntMatrix::Zero(gens_.size() + 2 * n_, 2 * n_);
    for (std::size_t i = 0; i < gens_.size(); ++i)
        for (int j = 0; j < n_; ++j) {
            M(i, j) = gens_[i].x[j];
            M(i, n_ + j) = gens_[i].z[j];
        }
    for (int j = 0; j < 2 * n_; ++j) M(gens_.size() + j, j) = d_;
    SmithDecomposition s = smith_normal_form(M);
    BigInt prod = 1;
    for (int j = 0; j < 2 * n_; ++j) prod *= s.D(j, j);
    BigInt order = 1;
    for (int j = 0; j < 2 * n_; ++j) order *= d_;
    order /= prod;
    std::uint64_t k = 0;
    while (order > 1) {
        if (order % d_ != 0) return UINT64_MAX;
        order /= d_;
        ++k;
    }
    return k;
}

bool StabilizerTableau::valid() const
{
    for (std::size_t i = 0; i < gens_.size(); ++i)
        for (std::size_t j = i + 1; j < gens_.size(); ++j)
            if (commutator(gens_[i], gens_[j]) != 0) return false;
    return group_order_log_d() == static_cast<std::uint64_t>(n_);
}

bool StabilizerTableau::operator==(const StabilizerTableau& o) const
{
    if (n_ != o.n_ || d_ != o.d_ || gens_.size() != o.gens_.size()) return false;
    for (std::size_t i = 0; i < gens_.size(); ++i)
        if (gens_[i].x != o.gens_[i].x || gens_[i].z != o.gens_[i].z || gens_[i].phase != o.gens_[i].phase)
            return false;
    return true;
}

StabilizerTableau new_logical_state(int n, int d, const std::vector<long>& labels)
{
    if (static_cast<int>(labels.size()) != n) throw DimensionError("one label per qudit required");
    const int D = d % 2 == 1 ? d : 2 * d;
    std::vector<PauliElement> gens;
    for (int q = 0; q < n; ++q) {
        if (labels[q] < 0 || labels[q] >= d) throw ValidationError("label_range", "logical label outside [0, d)");
        PauliElement g;
        g.x.assign(n, 0);
        g.z.assign(n, 0);
        g.z[q] = 1;
        g.phase = modp(-labels[q] * (D / d), D);
        gens.push_back(g);
    }
    return StabilizerTableau(n, d, gens);
}

StabilizerTableau apply_clifford(const StabilizerTableau& t, CliffordGate gate, const std::vector<int>& targets)
{
    const int n = t.n(), d = t.d(), D = t.D();
    const std::size_t need = gate == CliffordGate::Sum ? 2 : 1;
    if (targets.size() != need) throw ValidationError("target_count", "wrong number of gate targets");
    for (int q : targets)
        if (q < 0 || q >= n) throw ValidationError("target_range", "gate target outside [0, n)");
    if (gate == CliffordGate::Sum && targets[0] == targets[1])
        throw ValidationError("target_distinct", "SUM control and target must differ");

    auto unit = [&](int q, bool isx) {
        PauliElement e;
        e.x.assign(n, 0);
        e.z.assign(n, 0);
        (isx ? e.x : e.z)[q] = 1;
        return e;
    };
    std::vector<PauliElement> imgx, imgz;
    for (int q = 0; q < n; ++q) {
        imgx.push_back(unit(q, true));
        imgz.push_back(unit(q, false));
    }
    const int a = targets[0];
    switch (gate) {
        case CliffordGate::F:
            imgx[a] = unit(a, false);
            imgz[a] = unit(a, true);
            imgz[a].x[a] = d - 1;
            break;
        case CliffordGate::P:
            imgx[a].z[a] = 1;
            imgx[a].phase = d % 2 == 1 ? 0 : 1;
            break;
        case CliffordGate::Sum: {
            const int c = targets[0], tg = targets[1];
            imgx[c].x[tg] = 1;
            imgz[tg].z[c] = d - 1;
            break;
        }
        case CliffordGate::X:
            imgz[a].phase = modp(-(D / d), D);
            break;
        case CliffordGate::Z:
            imgx[a].phase = D / d;
            break;
    }
    std::vector<PauliElement> out;
    for (const auto& g : t.gens_) {
        PauliElement acc;
        acc.x.assign(n, 0);
        acc.z.assign(n, 0);
        acc.phase = g.phase;
        for (int q = 0; q < n; ++q)
            if (g.x[q]) acc = t.multiply(acc, t.power(imgx[q], g.x[q]));
        for (int q = 0; q < n; ++q)
            if (g.z[q]) acc = t.multiply(acc, t.power(imgz[q], g.z[q]));
        out.push_back(acc);
    }
    return StabilizerTableau(n, d, out);
}

MeasurementResult measure_hw(const StabilizerTableau& t, const HWObservable& obs, std::uint64_t seed)
{
    const int d = t.d(), D = t.D();
    const PauliElement O = t.from_observable(obs);
    PauliElement Od = t.power(O, d);
    if (Od.phase != 0) throw ValidationError("observable_order", "observable does not satisfy O^d = I");

    std::vector<PauliElement> rows = t.generators();
    std::vector<long> s;
    for (const auto& g : rows) s.push_back(t.commutator(O, g));

    // Euclid on the commutator values so that only rows[0] fails to commute
    for (;;) {
        std::size_t best = rows.size();
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (s[i] != 0 && (best == rows.size() || s[i] < s[best])) best = i;
        if (best == rows.size()) break;
        bool others = false;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == best || s[i] == 0) continue;
            const long q = s[i] / s[best];
            rows[i] = t.multiply(rows[i], t.power(rows[best], -q));
            s[i] = modp(s[i] - q * s[best], d);
            others = others || s[i] != 0;
        }
        if (!others) {
            std::swap(rows[0], rows[best]);
            std::swap(s[0], s[best]);
            break;
        }
    }

    MeasurementResult res{0, true, 1, t};
    if (s.empty() || s[0] == 0) {
        auto gap = t.membership_phase(O);
        if (!gap) throw std::logic_error("commuting observable outside a maximal stabilizer group");
        if (*gap % (D / d) != 0) throw std::logic_error("eigenvalue outside the d-th roots of unity");
        res.outcome = *gap / (D / d);
        return res;
    }
    const long gint = s[0];
    const long gp = std::gcd(gint, static_cast<long>(d));
    const long r0 = d / gp;
    auto gap = t.membership_phase(t.power(O, r0));
    if (!gap || *gap % (D / d) != 0) throw std::logic_error("O^r0 not resolved in the stabilizer group");
    const long c = *gap / (D / d);
    if (c % r0 != 0) throw std::logic_error("inconsistent eigenvalue of O^r0");
    const long cprime = c / r0;
    const long count = r0;  // outcomes k = c' + g' i
    const long i = static_cast<long>(uniform_below(seed, static_cast<std::uint64_t>(count)));
    const long k = modp(cprime + gp * i, d);

    std::vector<PauliElement> next;
    next.push_back(t.power(rows[0], r0));
    for (std::size_t j = 1; j < rows.size(); ++j) next.push_back(rows[j]);
    PauliElement Ok = O;
    Ok.phase = modp(O.phase - k * (D / d), D);
    next.push_back(Ok);
    res.outcome = k;
    res.deterministic = false;
    res.outcome_count = count;
    res.state = StabilizerTableau(t.n(), d, next);
    return res;
}

namespace {

CliffordGate tableau_gate(const NamedGate& g)
{
    switch (g.kind) {
        case GateKind::Fourier: return CliffordGate::F;
        case GateKind::Phase: return CliffordGate::P;
        case GateKind::Sum: return CliffordGate::Sum;
        case GateKind::PauliX: return CliffordGate::X;
        case GateKind::PauliZ: return CliffordGate::Z;
        default: throw ValidationError("tableau_gate", "tableau circuits accept fourier, phase, sum, x and z only");
    }
}

HWObservable to_observable(const HWSpec& h)
{
    HWObservable o;
    o.u = h.x;
    o.u.insert(o.u.end(), h.z.begin(), h.z.end());
    return o;
}

}  // namespace

std::vector<ShotRecord> run_tableau_circuit(const CircuitDescription& circuit, std::size_t shots, std::uint64_t seed,
                                            int threads)
{
    std::vector<long> labels;
    for (const auto& in : circuit.inputs) {
        if (in.kind != InputKind::Ideal) throw ValidationError("tableau_input", "tableau circuits take ideal logical inputs");
        labels.push_back(in.label);
    }
    const StabilizerTableau start = new_logical_state(circuit.n, circuit.d, labels);
    struct Step {
        bool measure;
        CliffordGate gate;
        std::vector<int> targets;
        HWObservable obs;
    };
    std::vector<Step> steps;
    for (const auto& st : circuit.steps) {
        if (st.is_measurement) steps.push_back({true, CliffordGate::F, {}, to_observable(st.observable)});
        else steps.push_back({false, tableau_gate(st.gate), st.gate.targets, {}});
    }
    if (circuit.measurement.kind == MeasurementKind::HeisenbergWeyl)
        for (const auto& h : circuit.measurement.observables) steps.push_back({true, CliffordGate::F, {}, to_observable(h)});
    else if (circuit.measurement.kind != MeasurementKind::None)
        throw ValidationError("tableau_measurement", "tableau circuits measure Heisenberg-Weyl observables");

    std::vector<ShotRecord> out(shots);
    auto worker = [&](std::size_t first, std::size_t stride) {
        for (std::size_t shot = first; shot < shots; shot += stride) {
            StabilizerTableau t = start;
            const std::uint64_t shot_seed = split_seed(seed, shot);
            std::uint64_t mi = 0;
            for (const auto& st : steps) {
                if (!st.measure) {
                    t = apply_clifford(t, st.gate, st.targets);
                    continue;
                }
                MeasurementResult r = measure_hw(t, st.obs, split_seed(shot_seed, mi++));
                out[shot].outcomes.push_back(r.outcome);
                out[shot].deterministic.push_back(r.deterministic);
                t = std::move(r.state);
            }
        }
    };
    const int nt = std::max(1, threads);
    if (nt == 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < nt; ++k) pool.emplace_back(worker, k, nt);
        for (auto& th : pool) th.join();
    }
    return out;
}

DimensionLift::DimensionLift(long d1_, long a_) : d1(d1_), a(a_), d2(a_ * a_ * d1_)
{
    if (d1 < 2 || a < 1) throw ValidationError("lift", "need d1 >= 2 and a >= 1");
}

SymbolicState lift_dimension(long j, const DimensionLift& lift)
{
    if (j < 0 || j >= lift.d1) throw ValidationError("label_range", "logical label outside [0, d1)");
    SymbolicState s;
    s.d = lift.d2;
    s.norm = lift.a;
    for (long k = 0; k < lift.a; ++k) s.coeff[modp(lift.a * j + lift.d1 * lift.a * k, lift.d2)] += 1;
    return s;
}

SymbolicState apply_x(const SymbolicState& s, long times)
{
    SymbolicState out;
    out.d = s.d;
    out.norm = s.norm;
    for (const auto& [k, c] : s.coeff) out.coeff[modp(k + times, s.d)] += c;
    return out;
}

StabilizerTableau lifted_tableau(long j, const DimensionLift& lift)
{
    const long d2 = lift.d2;
    const long D = d2 % 2 == 1 ? d2 : 2 * d2;
    PauliElement gx{{lift.d1 * lift.a}, {0}, 0};
    PauliElement gz{{0}, {lift.a}, modp(-lift.a * lift.a * j * (D / d2), D)};
    return StabilizerTableau(1, static_cast<int>(d2), {gx, gz});
}

DenseState::DenseState(int n, int d, const std::vector<long>& labels) : n_(n), d_(d)
{
    std::size_t size = 1;
    for (int q = 0; q < n; ++q) size *= d;
    amp_.assign(size, 0.0);
    amp_[index(labels)] = 1.0;
}

DenseState::DenseState(int n, int d, std::vector<std::complex<double>> amplitudes)
    : n_(n), d_(d), amp_(std::move(amplitudes))
{
}

std::vector<long> DenseState::digits(std::size_t idx) const
{
    std::vector<long> out(n_);
    for (int q = 0; q < n_; ++q) {
        out[q] = static_cast<long>(idx % d_);
        idx /= d_;
    }
    return out;
}

std::size_t DenseState::index(const std::vector<long>& dg) const
{
    std::size_t idx = 0;
    for (int q = n_ - 1; q >= 0; --q) idx = idx * d_ + static_cast<std::size_t>(modp(dg[q], d_));
    return idx;
}

void DenseState::apply(CliffordGate gate, const std::vector<int>& targets)
{
    using cd = std::complex<double>;
    const double pi = std::numbers::pi;
    auto omega = [&](double k, double m) { return std::exp(cd(0, 2 * pi * k / m)); };
    std::vector<cd> out(amp_.size(), 0.0);
    const int a = targets.at(0);
    for (std::size_t idx = 0; idx < amp_.size(); ++idx) {
        if (amp_[idx] == cd(0)) continue;
        std::vector<long> dg = digits(idx);
        const long j = dg[a];
        switch (gate) {
            case CliffordGate::X:
                dg[a] = j + 1;
                out[index(dg)] += amp_[idx];
                break;
            case CliffordGate::Z:
                out[idx] += omega(j, d_) * amp_[idx];
                break;
            case CliffordGate::P: {
                const long sig = d_ % 2 == 1 ? 1 : 0;
                out[idx] += omega(static_cast<double>(j * (j - sig)), 2.0 * d_) * amp_[idx];
                break;
            }
            case CliffordGate::F:
                for (long r = 0; r < d_; ++r) {
                    dg[a] = r;
                    out[index(dg)] += omega(static_cast<double>((r * j) % d_), d_) * amp_[idx] / std::sqrt(double(d_));
                }
                break;
            case CliffordGate::Sum:
                dg[targets.at(1)] += dg[a];
                out[index(dg)] += amp_[idx];
                break;
        }
    }
    amp_ = std::move(out);
}

std::vector<std::complex<double>> DenseState::apply_observable(const HWObservable& obs,
                                                               const std::vector<std::complex<double>>& v) const
{
    using cd = std::complex<double>;
    const int D = d_ % 2 == 1 ? d_ : 2 * d_;
    const double pi = std::numbers::pi;
    long xz = 0;
    for (int q = 0; q < n_; ++q) xz += obs.u[q] * obs.u[n_ + q];
    const long h = d_ % 2 == 1 ? (d_ + 1) / 2 : 1;
    const long phase = modp(h * modp(xz, D) + obs.phase, D);
    std::vector<cd> out(v.size(), 0.0);
    for (std::size_t idx = 0; idx < v.size(); ++idx) {
        if (v[idx] == cd(0)) continue;
        std::vector<long> dg = digits(idx);
        long zj = 0;
        for (int q = 0; q < n_; ++q) zj += obs.u[n_ + q] * dg[q];
        const double ph = 2 * pi * (static_cast<double>(phase) / D + static_cast<double>(modp(zj, d_)) / d_);
        for (int q = 0; q < n_; ++q) dg[q] += obs.u[q];
        out[index(dg)] += std::exp(cd(0, ph)) * v[idx];
    }
    return out;
}

std::vector<std::pair<double, DenseState>> DenseState::measure_branches(const HWObservable& obs) const
{
    using cd = std::complex<double>;
    const double pi = std::numbers::pi;
    std::vector<std::vector<cd>> powers{amp_};
    for (int m = 1; m < d_; ++m) powers.push_back(apply_observable(obs, powers.back()));
    std::vector<std::pair<double, DenseState>> out;
    for (int k = 0; k < d_; ++k) {
        std::vector<cd> w(amp_.size(), 0.0);
        for (int m = 0; m < d_; ++m) {
            const cd f = std::exp(cd(0, -2 * pi * m * k / d_)) / double(d_);
            for (std::size_t i = 0; i < w.size(); ++i) w[i] += f * powers[m][i];
        }
        double p = 0;
        for (const auto& x : w) p += std::norm(x);
        if (p > 1e-14)
            for (auto& x : w) x /= std::sqrt(p);
        out.emplace_back(p, DenseState(n_, d_, std::move(w)));
    }
    return out;
}

}  // namespace gkpsim
