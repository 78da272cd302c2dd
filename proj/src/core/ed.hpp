#pragma once

#include <vector>

#include "dense.hpp"
#include "pauli.hpp"

// Exact diagonalization of the impurity Hamiltonian and the Lehmann
// representation of the retarded impurity Green's function
//   iG(t>0) = Re <psi0| U^dag(t) X0 U(t) X0 |psi0> = sum_k w_k cos(w_k t).
// For the half-filled two-site model there are exactly two distinct pole
// frequencies, conventionally written 2 alpha_1 cos(w1 t) + 2 alpha_2 cos(w2 t).

namespace aimdmft::ed {

struct Pole {
    double omega;
    double weight;
};

struct Spectrum {
    double ground_energy = 0.0;
    std::vector<Pole> poles;  // ascending frequency, weights sum to 1

    double greens(double t) const;  // sum_k w_k cos(w_k t)
};

struct TwoPole {
    double omega1 = 0.0;
    double omega2 = 0.0;
    double alpha1 = 0.0;  // weight/2, matching the 2[a1 cos + a2 cos] form
    double alpha2 = 0.0;
};

// Full Lehmann data for <psi0| A(t) B |psi0> with A = B = X0.
Spectrum lehmann(const PauliSum& hamiltonian);

// Convenience for the half-filled two-site model.
Spectrum lehmann(double u, double v);

// Collapse to the two-pole form; for a single pole (U = 0) both frequencies
// coincide. Throws if there are more than two poles.
TwoPole two_pole(const Spectrum& s);

// Dense ground state and energy of a PauliSum Hamiltonian. Throws when the
// ground state is degenerate beyond `gap_tol`.
struct GroundState {
    double energy;
    dense::Vector state;
};
GroundState ground_state(const PauliSum& hamiltonian, double gap_tol = 1e-10);

// <psi0| A(t) B |psi0> evaluated densely; A, B arbitrary Pauli strings.
dense::Cplx correlation(const PauliSum& hamiltonian, const PauliTerm& a,
                        const PauliTerm& b, double t);

}  // namespace aimdmft::ed
