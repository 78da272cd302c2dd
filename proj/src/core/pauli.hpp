#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Exact n-qubit Pauli string algebra in symplectic (x_bits, z_bits) encoding,
// plus the Jordan-Wigner construction of the Anderson impurity Hamiltonian.
//
// Conventions used throughout the project:
//   * qubit q corresponds to bit q of x_bits/z_bits (qubit 0 = LSB),
//   * in textual form qubit 0 is the leftmost character ("XXII" = X0 X1),
//   * (x,z) = (0,0) I, (1,0) X, (0,1) Z, (1,1) Y,
//   * a term represents  coeff * i^phase_pow * (tensor of literal Paulis).

namespace aimdmft {

class PauliError : public std::runtime_error {
  public:
    explicit PauliError(const std::string& what) : std::runtime_error(what) {}
};

struct PauliTerm {
    int n = 0;
    std::uint64_t x_bits = 0;
    std::uint64_t z_bits = 0;
    std::uint8_t phase_pow = 0;  // power of i, in {0,1,2,3}
    double coeff = 1.0;

    static PauliTerm identity(int n);
    // Single-qubit letter ('I','X','Y','Z') at qubit q.
    static PauliTerm single(int n, int q, char letter);
    // Parse "XYIZ" (qubit 0 leftmost). Coefficient 1, phase +1.
    static PauliTerm from_string(const std::string& letters);

    bool is_identity_string() const { return x_bits == 0 && z_bits == 0; }
    bool is_hermitian() const { return (phase_pow & 1) == 0; }
    // Real sign carried by the phase; only valid for Hermitian terms.
    double sign() const { return phase_pow == 0 ? 1.0 : -1.0; }
    int weight() const;
    int y_count() const;
    std::string string_repr() const;  // letters only, e.g. "XXII"
};

// Exact group product a*b with phase tracking. Throws on qubit-count mismatch.
PauliTerm multiply(const PauliTerm& a, const PauliTerm& b);

// True when the two strings commute (symplectic form vanishes).
bool strings_commute(const PauliTerm& a, const PauliTerm& b);

// [a,b] = ab - ba. Exactly Zero (nullopt) for commuting strings, else 2*(a*b).
std::optional<PauliTerm> commutator(const PauliTerm& a, const PauliTerm& b);

// Hermitian sum of Pauli strings with real coefficients, canonically stored:
// terms sorted by (x_bits, z_bits), duplicates merged, zero terms dropped,
// phases folded into the coefficients.
class PauliSum {
  public:
    struct Entry {
        std::uint64_t x_bits;
        std::uint64_t z_bits;
        double coeff;
    };

    PauliSum() = default;
    explicit PauliSum(int n) : n_(n) {}

    int n() const { return n_; }
    const std::vector<Entry>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    // Folds the term's phase into the coefficient; throws for non-Hermitian
    // phases (i, -i).
    void add(const PauliTerm& t);
    void add(std::uint64_t x, std::uint64_t z, double c);

    // Bulk constructor: one canonicalization pass over all entries.
    static PauliSum from_entries(int n, std::vector<Entry> entries);

    double coefficient(std::uint64_t x, std::uint64_t z) const;
    PauliTerm term_at(std::size_t idx) const;

    // sqrt(<S,S>) under the normalized trace inner product.
    double norm() const;

    std::string to_string() const;  // "0.5*XXII + 1*ZIZI"
    static PauliSum parse(const std::string& text);

  private:
    void canonicalize();

    int n_ = 0;
    std::vector<Entry> terms_;
};

// Normalized trace inner product Tr(ab)/2^n; <P,P> = 1 for unit strings.
double trace_inner(const PauliSum& a, const PauliSum& b);

// e^{i theta p} s e^{-i theta p} for a single unit Pauli string p, computed
// exactly term by term (commuting terms pass through, anticommuting terms
// rotate into cos(2 theta) q + i sin(2 theta) p q).
PauliSum adjoint_rotate(double theta, const PauliTerm& p, const PauliSum& s);

// Anderson impurity model parameters. Site 0 is the impurity, sites 1..N_b
// are bath sites; spin-up modes map to qubits 0..N_b and spin-down modes to
// qubits N_b+1..2N_b+1.
struct AimParameters {
    int n_bath = 1;
    std::vector<double> v;    // hybridization per bath site, size n_bath
    std::vector<double> eps;  // on-site energies, size n_bath+1
    double u = 0.0;
    double mu = 0.0;

    int qubits() const { return 2 * (n_bath + 1); }

    // Half-filled two-site model: mu = U/2, eps = {0, U/2}.
    static AimParameters half_filled_two_site(double u, double v);
};

// Jordan-Wigner mapped AIM Hamiltonian (constant U/4 shift dropped).
// For the half-filled two-site model this is exactly
//   (V/2)(X0X1 + Y0Y1 + X2X3 + Y2Y3) + (U/4) Z0Z2.
PauliSum jw_aim_hamiltonian(const AimParameters& p);

}  // namespace aimdmft
