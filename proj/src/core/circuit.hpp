#pragma once

#include <string>
#include <vector>

#include "cartan.hpp"
#include "pauli.hpp"

// Gate-level circuit representation and the three circuit constructions:
// the four-qubit ground-state ansatz, Pauli-string exponential fragments,
// and the Hadamard-test Green's function circuit with the k0 commutation
// trick folded into state preparation.

namespace aimdmft::circuit {

class CircuitError : public std::runtime_error {
  public:
    explicit CircuitError(const std::string& what) : std::runtime_error(what) {}
};

enum class GateKind { H, S, Sdg, X, Rx, Rz, Cnot };

struct Gate {
    GateKind kind;
    int q0 = 0;          // target (single-qubit) or control (CNOT)
    int q1 = -1;         // CNOT target
    double theta = 0.0;  // Rx/Rz angle

    static Gate h(int q) { return {GateKind::H, q}; }
    static Gate s(int q) { return {GateKind::S, q}; }
    static Gate sdg(int q) { return {GateKind::Sdg, q}; }
    static Gate x(int q) { return {GateKind::X, q}; }
    static Gate rx(int q, double th) { return {GateKind::Rx, q, -1, th}; }
    static Gate rz(int q, double th) { return {GateKind::Rz, q, -1, th}; }
    static Gate cnot(int c, int t) { return {GateKind::Cnot, c, t}; }

    bool touches(int q) const { return q0 == q || q1 == q; }
};

struct Circuit {
    int width = 0;
    std::vector<Gate> gates;

    Circuit() = default;
    explicit Circuit(int w) : width(w) {}

    int cnot_count() const;
    void append(const Gate& g);
    void append(const Circuit& fragment);  // widths must match

    // One gate per line: "GATE q0 [q1] [theta]".
    std::string export_text() const;
    static Circuit import_text(const std::string& text);
};

// Fixed 4-qubit ansatz: X layer, Rx(theta) on qubit 2, CX(2,1), a Clifford
// dressing and the two outer CNOTs. Prepares
//   cos(theta/2 + pi/4)/sqrt2 (|1010> + |0101>)
// + sin(theta/2 + pi/4)/sqrt2 (|1001> + |0110>)
// embedded in a circuit of width `width` (>= 4, extra qubits idle).
Circuit ground_state_ansatz(double theta, int width = 4);

// 1-D energy minimization of the ansatz over theta in [-pi, pi); the
// achieved energy equals -sqrt(4V^2 + (U/4)^2). Throws for V = 0.
double optimize_ansatz_angle(double u, double v);

// exp(-i theta P) as a basis-change layer, CNOT ladder, Rz(2 theta), mirror.
// The term's coefficient and sign fold into the effective angle. Identity
// strings give an empty fragment. With `linear_chain` true the ladder only
// uses nearest-neighbor CNOTs, inserting restoring SWAPs (3 CNOTs each).
Circuit compile_pauli_exponential(const PauliTerm& p, double theta, int width = -1,
                                  bool linear_chain = false);

// Hadamard-test circuit for Re<U^dag(t) X0 U(t) X0> = <Z_ancilla>, with the
// k0 block folded into state preparation and only the e^{-ith} angles
// depending on t. System qubits 0..3, ancilla 4.
Circuit greens_function_circuit(const cartan::CartanSolution& sol, double t,
                                double theta_gs);

// t-independent prefix (ansatz, e^{-ik0}, ancilla Hadamard, controlled-X0,
// e^{-ik1}) and t-dependent suffix (e^{-ith}, e^{ik1}, controlled-X0,
// Hadamard); greens_function_circuit is exactly prefix + suffix.
Circuit greens_prefix(const cartan::CartanSolution& sol, double theta_gs);
Circuit greens_suffix(const cartan::CartanSolution& sol, double t);

inline constexpr int kGreensAncilla = 4;

// Local rewrite passes: CNOT pair cancellation, same-axis rotation merging,
// identity rotation removal, H/H, S/Sdg and X/X cancellation. Never
// increases the CNOT count; unitary preserved up to global phase.
Circuit optimize_circuit(const Circuit& c);

// Route all CNOTs onto a linear chain (order: ancilla last qubit at one end
// when width is 5, otherwise natural order) by inserting restoring SWAPs.
Circuit transpile_linear(const Circuit& c);

// Dense unitary of the circuit (little-endian: qubit 0 = LSB of the index).
dense::Matrix unitary_of(const Circuit& c);

}  // namespace aimdmft::circuit
