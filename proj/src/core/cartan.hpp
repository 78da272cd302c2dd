#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dense.hpp"
#include "lie.hpp"
#include "pauli.hpp"

// Numerical KHK factorization  e^{-itH} = K e^{-ith} K^dag  with
// K = prod_j e^{i kappa_j k_j} over the k basis and h = sum_j eta_j h_j in
// the Cartan subalgebra. The coefficients come from locating an extremum of
//   f(kappa) = < Ad_K(v), H >,  v = sum_j gamma^j h_j  (gamma = pi),
// followed by a Gauss-Newton polish that zeroes the components of
// Ad_K^dag(H) outside span(h) down to machine precision.

namespace aimdmft::cartan {

class CartanError : public std::runtime_error {
  public:
    explicit CartanError(const std::string& what) : std::runtime_error(what) {}
};

struct Options {
    double gradient_tol = 1e-10;
    int max_iterations = 10000;
    double residual_tol_factor = 1e-10;  // relative to ||H||
    int polish_iterations = 40;
};

struct CartanSolution {
    int n = 0;
    bool k_abelian = false;
    std::vector<PauliTerm> k_basis;  // decomposition order
    std::vector<double> kappa;       // radians, aligned with k_basis
    std::vector<PauliTerm> h_basis;
    std::vector<double> eta;         // energy units, aligned with h_basis
    std::vector<std::size_t> k0_indices;  // into k_basis, [k0, X0] = 0
    std::vector<std::size_t> k1_indices;
    double residual = 0.0;  // norm of Ad_K^dag(H) outside span(h)
    double f_value = 0.0;
    std::vector<double> f_history;  // accepted objective values, non-increasing

    std::string serialize() const;  // structured text, 17 significant digits
    static CartanSolution deserialize(const std::string& text);
};

// The fixed regular element v of the objective. Coefficients gamma^j are
// rescaled by a common factor when they would overflow; f is linear in v so
// the extremum set is unchanged.
PauliSum cartan_v(const std::vector<PauliTerm>& h_basis);

double objective(const std::vector<double>& kappa,
                 const std::vector<PauliTerm>& k_basis, const PauliSum& v,
                 const PauliSum& hamiltonian);

std::vector<double> objective_gradient(const std::vector<double>& kappa,
                                       const std::vector<PauliTerm>& k_basis,
                                       const PauliSum& v,
                                       const PauliSum& hamiltonian);

// Ad_{K^dag}(H) for K built from (kappa, k_basis).
PauliSum conjugated_hamiltonian(const std::vector<double>& kappa,
                                const std::vector<PauliTerm>& k_basis,
                                const PauliSum& hamiltonian);

// Random initial kappa in [-pi, pi), BFGS descent, Gauss-Newton polish.
// Throws CartanError when the optimizer stalls or the residual stays above
// tolerance (spurious extremum; retry with a different seed).
CartanSolution solve(const PauliSum& hamiltonian, const lie::Decomposition& dec,
                     std::uint64_t seed, const Options& opts = {});

// solve() with automatic seed bumps on failure.
CartanSolution solve_with_retries(const PauliSum& hamiltonian,
                                  const lie::Decomposition& dec,
                                  std::uint64_t seed, int retries = 4,
                                  const Options& opts = {});

// Dense K = prod_j e^{i kappa_j k_j}.
dense::Matrix dense_k(const CartanSolution& sol);

// Dense K e^{-ith} K^dag.
dense::Matrix khk_evolution(const CartanSolution& sol, double t);

// || e^{-itH} - K e^{-ith} K^dag ||_F against the dense eigendecomposition.
double reconstruction_error(const CartanSolution& sol, const PauliSum& hamiltonian,
                            double t);

}  // namespace aimdmft::cartan
