#include "trotter.hpp"
#include <algorithm>

#include <cmath>
#include <cstdio>
#include <sstream>

#include "optim.hpp"

namespace aimdmft::trotter {

namespace {

using circuit::Circuit;
using circuit::Gate;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// e^{-i a Z0 Z2}: CNOT ladder and Rz(2a).
void append_zz(Circuit& c, double a) {
    c.append(Gate::cnot(0, 2));
    c.append(Gate::rz(2, 2.0 * a));
    c.append(Gate::cnot(0, 2));
}

// e^{-i a (X_q X_{q+1} + Y_q Y_{q+1})} with two CNOTs: the Clifford
// C = H_q CX(q,q+1) Rx(pi/2)_q Rx(pi/2)_{q+1} maps XX+YY to Z_q + Z_{q+1}.
void append_hopping_pair(Circuit& c, int q, double a) {
    c.append(Gate::rx(q, M_PI / 2));
    c.append(Gate::rx(q + 1, M_PI / 2));
    c.append(Gate::cnot(q, q + 1));
    c.append(Gate::h(q));
    c.append(Gate::rz(q, 2.0 * a));
    c.append(Gate::rz(q + 1, 2.0 * a));
    c.append(Gate::h(q));
    c.append(Gate::cnot(q, q + 1));
    c.append(Gate::rx(q, -M_PI / 2));
    c.append(Gate::rx(q + 1, -M_PI / 2));
}

}  // namespace

circuit::Circuit trotter2_circuit(double u, double v, double t, int r) {
    if (r < 1) throw circuit::CircuitError("need at least one Trotter step");
    const double tau = t / static_cast<double>(r);
    Circuit c(4);
    // Rightmost factor first: e^{-i(tau/2)H0}, then r blocks of
    // e^{-i tau H1} e^{-i tau H0}, then e^{+i(tau/2)H0}.
    append_zz(c, 0.5 * tau * u / 4.0);
    for (int step = 0; step < r; ++step) {
        append_hopping_pair(c, 0, tau * v / 2.0);
        append_hopping_pair(c, 2, tau * v / 2.0);
        append_zz(c, tau * u / 4.0);
    }
    append_zz(c, -0.5 * tau * u / 4.0);
    return c;
}

double trotter_error(double u, double v, double t, int r) {
    PauliSum h = jw_aim_hamiltonian(AimParameters::half_filled_two_site(u, v));
    dense::Matrix exact = dense::evolution_operator(dense::sum_matrix(h), t);
    dense::Matrix approx = circuit::unitary_of(trotter2_circuit(u, v, t, r));
    return dense::frobenius_distance(exact, approx);
}

int cnot_cost(int r, bool linear) { return linear ? 6 * r + 11 : 6 * r + 2; }

FitReport fit_error_coefficient(double u, double v, const std::vector<double>& t_grid,
                                const std::vector<int>& r_grid) {
    std::vector<double> ts = t_grid.empty()
                                 ? std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8}
                                 : t_grid;
    std::vector<int> rs = r_grid.empty() ? std::vector<int>{4, 8, 16, 32, 64} : r_grid;
    // The asymptotic coefficient is isolated by the deepest Trotter column:
    // at small r (and small t) the per-step errors still add coherently and
    // the effective coefficient sits well above the leading-order value.
    int r_deep = *std::max_element(rs.begin(), rs.end());
    double sxx = 0.0, sxy = 0.0;
    int used = 0;
    for (double t : ts) {
        double err = trotter_error(u, v, t, r_deep);
        if (err > 0.5) continue;  // outside the leading-order regime
        double x = t * t * t / (static_cast<double>(r_deep) * r_deep);
        sxx += x * x;
        sxy += x * err;
        ++used;
    }
    if (used == 0 || sxx == 0.0) {
        throw circuit::CircuitError("no points in the asymptotic fit regime");
    }
    FitReport rep;
    rep.coeff_frobenius = sxy / sxx;
    rep.coeff_normalized = rep.coeff_frobenius / 4.0;  // / sqrt(dim), dim = 16
    rep.chosen = rep.coeff_frobenius;
    rep.points_used = used;
    return rep;
}

FidelityModel fidelity_model(double f_alg, double f_cnot, int cnot_count) {
    FidelityModel m;
    m.f_alg = f_alg;
    m.f_cnot = f_cnot;
    m.cnot_count = cnot_count;
    m.f_total = f_alg * std::pow(f_cnot, cnot_count);
    return m;
}

Landscape fidelity_landscape(double u, double v, const std::vector<double>& t_grid,
                             const std::vector<double>& r_grid, double f_cnot) {
    if (t_grid.empty() || r_grid.empty()) {
        throw circuit::CircuitError("empty landscape grid");
    }
    Landscape land;
    land.fit_coeff = fit_error_coefficient(u, v).chosen;
    land.f_cnot = f_cnot;
    land.cartan_high = std::pow(f_cnot, 77);

    auto f_trotter = [&](double t, double r) {
        return std::max(0.0, 1.0 - land.fit_coeff * t * t * t / (r * r));
    };
    auto f_runtime = [&](double r) { return std::pow(f_cnot, 6.0 * r + 11.0); };

    for (double t : t_grid) {
        for (double r : r_grid) {
            LandscapePoint p;
            p.t = t;
            p.r = r;
            p.f_trotter = f_trotter(t, r);
            p.f_runtime = f_runtime(r);
            p.f_total = p.f_trotter * p.f_runtime;
            land.grid.push_back(p);
        }
        // Maximize over real r >= 1 (on log2 r to keep the search stable).
        auto neg_total = [&](double lg) {
            double r = std::exp2(lg);
            return -f_trotter(t, r) * f_runtime(r);
        };
        auto best = optim::brent_minimize(neg_total, 0.0, 20.0, 1e-10);
        double f1 = -neg_total(0.0);
        MaxCurvePoint m;
        m.t = t;
        if (f1 > -best.f) {
            m.f_max = f1;
            m.r_opt = 1.0;
        } else {
            m.f_max = -best.f;
            m.r_opt = std::exp2(best.x);
        }
        land.curve.push_back(m);
    }
    return land;
}

std::string Landscape::grid_csv() const {
    std::ostringstream out;
    out << "t,r,F_trotter,F_runtime,F_total\n";
    for (const LandscapePoint& p : grid) {
        out << format_double(p.t) << "," << format_double(p.r) << ","
            << format_double(p.f_trotter) << "," << format_double(p.f_runtime) << ","
            << format_double(p.f_total) << "\n";
    }
    return out.str();
}

std::string Landscape::curve_csv() const {
    std::ostringstream out;
    out << "t,F_max,r_opt,cartan_low,cartan_high\n";
    for (const MaxCurvePoint& p : curve) {
        out << format_double(p.t) << "," << format_double(p.f_max) << ","
            << format_double(p.r_opt) << "," << format_double(cartan_low) << ","
            << format_double(cartan_high) << "\n";
    }
    return out.str();
}

}  // namespace aimdmft::trotter
