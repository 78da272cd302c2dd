#pragma once

#include <string>
#include <vector>

#include "circuit.hpp"

// Second-order Trotter comparator: circuits for the two-site impurity
// Hamiltonian split H0 = (U/4) Z0Z2, H1 = hopping sum, the leading-order
// error-coefficient fit, the CNOT cost model, and the total-fidelity
// landscape with the fast-forwarding reference band.

namespace aimdmft::trotter {

// e^{+i(tau/2)H0} (e^{-i tau H0} e^{-i tau H1})^r e^{-i(tau/2)H0}, tau = t/r.
// Hopping exponentials use the two-CNOT XX+YY diagonalization; the raw
// circuit optimizes down to 6r + 2 CNOTs on all-to-all connectivity.
circuit::Circuit trotter2_circuit(double u, double v, double t, int r);

// Frobenius norm || e^{-itH} - U_circuit || via dense 16x16 matrices.
double trotter_error(double u, double v, double t, int r);

// CNOT cost model: 6r + 2 all-to-all; 6r + 11 on the linear layout
// (two routing SWAPs plus state preparation).
int cnot_cost(int r, bool linear);

struct FitReport {
    double coeff_frobenius = 0.0;   // fit of c in c t^3 / r^2, plain ||.||_F
    double coeff_normalized = 0.0;  // same fit with ||.||_F / sqrt(dim)
    double chosen = 0.0;            // the convention that reproduces the
                                    // reference value (plain Frobenius)
    int points_used = 0;
};

// Least-squares fit over the asymptotic regime (errors above 0.5 dropped).
FitReport fit_error_coefficient(double u, double v,
                                const std::vector<double>& t_grid = {},
                                const std::vector<int>& r_grid = {});

struct FidelityModel {
    double f_cnot = 0.0;
    int cnot_count = 0;
    double f_alg = 0.0;
    double f_total = 0.0;  // f_alg * f_cnot^cnot_count
};

FidelityModel fidelity_model(double f_alg, double f_cnot, int cnot_count);

struct LandscapePoint {
    double t = 0.0;
    double r = 0.0;
    double f_trotter = 0.0;
    double f_runtime = 0.0;
    double f_total = 0.0;
};

struct MaxCurvePoint {
    double t = 0.0;
    double f_max = 0.0;
    double r_opt = 0.0;  // real-valued maximizer
};

struct Landscape {
    double fit_coeff = 0.0;
    double f_cnot = 0.0;
    double cartan_low = 0.18;   // experimental-fidelity bound
    double cartan_high = 0.0;   // f_cnot^77
    std::vector<LandscapePoint> grid;
    std::vector<MaxCurvePoint> curve;

    std::string grid_csv() const;   // t,r,F_trotter,F_runtime,F_total
    std::string curve_csv() const;  // t,F_max,r_opt,cartan_low,cartan_high
};

// F_Trotter = max(0, 1 - c t^3/r^2), F_runtime = f_cnot^(6r+11), per-t
// maximum over real r >= 1.
Landscape fidelity_landscape(double u, double v, const std::vector<double>& t_grid,
                             const std::vector<double>& r_grid,
                             double f_cnot = 0.9921);

}  // namespace aimdmft::trotter
