#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "gkpsim/gkp_core.hpp"

namespace gkpsim {

// omega_D^phase X^x Z^z, all X factors to the left of all Z factors.
struct PauliElement {
    std::vector<long> x, z;
    long phase = 0;  // mod D
};

// Weyl operator omega_D^(h x.z + phase) X^x Z^z with h = 1/2 in the phase ring.
struct HWObservable {
    std::vector<long> u;  // (x_1..x_n, z_1..z_n)
    long phase = 0;
};

enum class CliffordGate { F, P, Sum, X, Z };

class StabilizerTableau {
public:
    StabilizerTableau(int n, int d, std::vector<PauliElement> generators);

    int n() const { return n_; }
    int d() const { return d_; }
    int D() const { return D_; }
    const std::vector<PauliElement>& generators() const { return gens_; }

    // Pairwise commutation, no nontrivial phase in the group and order d^n.
    bool valid() const;
    std::uint64_t group_order_log_d() const;

    PauliElement multiply(const PauliElement& a, const PauliElement& b) const;
    PauliElement power(const PauliElement& a, long k) const;
    PauliElement inverse(const PauliElement& a) const;
    // AB = omega_d^commutator BA
    long commutator(const PauliElement& a, const PauliElement& b) const;
    PauliElement from_observable(const HWObservable& obs) const;

    // Express a vector in the group; the phase gap to the target is returned
    // as the eigenvalue exponent in Z_D, or nullopt when it is not a member.
    std::optional<long> membership_phase(const PauliElement& target) const;

    void canonicalize();
    bool operator==(const StabilizerTableau& other) const;

    friend StabilizerTableau apply_clifford(const StabilizerTableau& t, CliffordGate gate, const std::vector<int>& targets);

private:
    int n_, d_, D_;
    std::vector<PauliElement> gens_;
    std::vector<int> pivots_;
};

StabilizerTableau new_logical_state(int n, int d, const std::vector<long>& labels);
StabilizerTableau apply_clifford(const StabilizerTableau& t, CliffordGate gate, const std::vector<int>& targets);

struct MeasurementResult {
    long outcome = 0;  // eigenvalue omega_d^outcome
    bool deterministic = true;
    long outcome_count = 1;  // number of equally likely outcomes
    StabilizerTableau state;
};

MeasurementResult measure_hw(const StabilizerTableau& t, const HWObservable& obs, std::uint64_t seed);

std::uint64_t split_seed(std::uint64_t master, std::uint64_t index);

// One run of a tableau circuit: outcomes of every in-line and final measurement.
struct ShotRecord {
    std::vector<long> outcomes;
    std::vector<bool> deterministic;
};

std::vector<ShotRecord> run_tableau_circuit(const CircuitDescription& circuit, std::size_t shots, std::uint64_t seed,
                                            int threads = 1);

// Superposition (1/sqrt(norm)) sum_k coeff_k |k> with integer coefficients.
struct SymbolicState {
    long d = 2;
    long norm = 1;
    std::map<long, long> coeff;

    bool operator==(const SymbolicState& o) const { return d == o.d && norm == o.norm && coeff == o.coeff; }
};

struct DimensionLift {
    long d1, a, d2;
    DimensionLift(long d1_, long a_);
};

SymbolicState lift_dimension(long j, const DimensionLift& lift);
SymbolicState apply_x(const SymbolicState& s, long times = 1);
// Stabilizer of the lifted codeword on one qudit of dimension d2.
StabilizerTableau lifted_tableau(long j, const DimensionLift& lift);

// Dense state-vector oracle.
class DenseState {
public:
    DenseState(int n, int d, const std::vector<long>& labels);
    DenseState(int n, int d, std::vector<std::complex<double>> amplitudes);

    int n() const { return n_; }
    int d() const { return d_; }
    const std::vector<std::complex<double>>& amplitudes() const { return amp_; }

    void apply(CliffordGate gate, const std::vector<int>& targets);
    // Probability of each outcome and the normalized post-measurement states.
    std::vector<std::pair<double, DenseState>> measure_branches(const HWObservable& obs) const;
    std::vector<std::complex<double>> apply_observable(const HWObservable& obs,
                                                       const std::vector<std::complex<double>>& v) const;

private:
    int n_, d_;
    std::vector<std::complex<double>> amp_;
    std::vector<long> digits(std::size_t index) const;
    std::size_t index(const std::vector<long>& digits) const;
};

}  // namespace gkpsim
