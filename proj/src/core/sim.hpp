#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "circuit.hpp"

// Exact simulation backend: statevector (noiseless) and density-matrix
// (noisy) propagation, shot sampling with readout error, readout mitigation,
// and symmetry-sector post-selection.

namespace aimdmft::sim {

class SimError : public std::runtime_error {
  public:
    explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

struct ReadoutFlip {
    double p10 = 0.0;  // Pr(read 1 | prepared 0)
    double p01 = 0.0;  // Pr(read 0 | prepared 1)
};

struct NoiseModel {
    double cnot_depolarizing = 0.0;       // two-qubit depolarizing per CNOT
    std::vector<ReadoutFlip> readout;     // per qubit; empty = ideal readout

    bool ideal_readout() const;
    bool ideal_gates() const { return cnot_depolarizing == 0.0; }
    static NoiseModel ideal() { return {}; }
    // Mean CNOT error of the reference backend's calibration table.
    static NoiseModel default_hardware() { return {0.0079, {}}; }
};

struct QuantumState {
    enum class Mode { statevector, density };
    Mode mode = Mode::statevector;
    int n = 0;
    Eigen::VectorXcd vec;   // statevector mode
    Eigen::MatrixXcd rho;   // density mode

    long dim() const { return 1L << n; }
    // Outcome probabilities in the computational basis (tiny negative
    // density-matrix diagonals clipped to zero).
    std::vector<double> probabilities() const;
};

inline constexpr int kStatevectorCap = 12;
inline constexpr int kDensityCap = 6;

// Exact propagation. Without noise: statevector. With noise: density matrix,
// each CNOT followed by the two-qubit depolarizing channel on its operands.
// Deterministic; readout error is not applied here.
QuantumState run(const circuit::Circuit& c, const NoiseModel* noise = nullptr);

// Continue propagation of an existing state (prefix caching across the
// t-dependent tail of the Green's function circuits).
void apply(QuantumState& state, const circuit::Circuit& c, const NoiseModel* noise = nullptr);

QuantumState initial_state(int n, bool density);

double expectation_z(const QuantumState& state, int qubit);

struct ShotRecord {
    std::map<std::uint64_t, std::uint64_t> counts;  // bit q of key = qubit q
    std::uint64_t total_shots = 0;
    std::uint64_t post_selected = 0;  // retained count; equals total before
                                      // post-selection

    std::string to_text(int n_qubits) const;
};

// Multinomial sampling after applying the per-qubit readout confusion
// matrices; seeded and reproducible.
ShotRecord sample_shots(const QuantumState& state, std::uint64_t shots,
                        const NoiseModel& noise, std::uint64_t seed);

// Inverse tensor-product confusion matrix applied to the empirical
// distribution; negatives clipped, renormalized. Throws when a per-qubit
// confusion matrix is singular (p10 + p01 = 1).
std::vector<double> mitigate_readout(const ShotRecord& record, int n_qubits,
                                     const NoiseModel& noise);

// One particle per spin sector: (q0,q1) in {10,01} and (q2,q3) in {10,01}.
bool in_half_filled_sector(std::uint64_t outcome);

// Keep only sector-satisfying shots; throws when nothing is retained.
ShotRecord post_select(const ShotRecord& record);

// Distribution-level variant used after mitigation. Returns the retained
// weight fraction; the distribution is renormalized in place.
double post_select_distribution(std::vector<double>& probs);

// <Z_ancilla> of a distribution over 5-qubit outcomes.
double ancilla_expectation(const std::vector<double>& probs, int ancilla);

}  // namespace aimdmft::sim
