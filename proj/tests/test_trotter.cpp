#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/trotter.hpp"

using namespace aimdmft;

TEST_CASE("t = 0 gives the identity up to phase") {
    circuit::Circuit c = trotter::trotter2_circuit(2.0, 0.94, 0.0, 3);
    dense::Matrix u = circuit::unitary_of(c);
    CHECK(dense::phase_aligned_distance(u, dense::Matrix::Identity(16, 16)) < 1e-12);
    CHECK_THROWS_AS(trotter::trotter2_circuit(2.0, 0.94, 1.0, 0),
                    circuit::CircuitError);
}

TEST_CASE("error vanishes with the step count") {
    double e1 = trotter::trotter_error(2.0, 0.94, 2.0, 8);
    double e2 = trotter::trotter_error(2.0, 0.94, 2.0, 16);
    double e3 = trotter::trotter_error(2.0, 0.94, 2.0, 512);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));  // second order
    CHECK(e3 < 1e-4);
    CHECK(trotter::trotter_error(2.0, 0.94, 0.0, 4) < 1e-12);
}

TEST_CASE("CNOT cost model") {
    CHECK(trotter::cnot_cost(10, true) == 71);
    CHECK(trotter::cnot_cost(10, false) == 62);
    for (int r : {1, 3, 7}) {
        CHECK(trotter::cnot_cost(r, true) == 6 * r + 11);
        CHECK(trotter::cnot_cost(r, false) == 6 * r + 2);
        // The optimized all-to-all circuit realizes the model count.
        circuit::Circuit c = trotter::trotter2_circuit(2.0, 0.94, 1.7, r);
        CHECK(circuit::optimize_circuit(c).cnot_count() == 6 * r + 2);
    }
}

TEST_CASE("fitted coefficient reproduces the reference value") {
    trotter::FitReport fit = trotter::fit_error_coefficient(2.0, 0.94);
    CHECK(std::abs(fit.chosen - 0.152) <= 0.1 * 0.152);
    // The plain Frobenius convention is the one that reproduces it; the
    // sqrt(dim)-normalized value sits far outside the window.
    CHECK(fit.chosen == fit.coeff_frobenius);
    CHECK(std::abs(fit.coeff_normalized - 0.152) > 0.1 * 0.152);
}

TEST_CASE("fit is stable under grid refinement") {
    trotter::FitReport coarse = trotter::fit_error_coefficient(
        2.0, 0.94, {1, 2, 3, 4, 5, 6, 7, 8}, {4, 8, 16, 32, 64});
    trotter::FitReport fine = trotter::fit_error_coefficient(
        2.0, 0.94, {1.5, 2.5, 3.5, 4.5, 5.5, 6.5, 7.5, 8.0}, {8, 16, 32, 64, 96});
    CHECK(std::abs(coarse.chosen - fine.chosen) <= 0.05 * coarse.chosen);
}

TEST_CASE("runtime fidelity of the fast-forwarded circuit") {
    trotter::FidelityModel m = trotter::fidelity_model(1.0, 0.9921, 77);
    CHECK(m.f_total == doctest::Approx(0.543).epsilon(0.001 / 0.543));
    CHECK(std::abs(m.f_total - 0.543) <= 0.001);
}

TEST_CASE("fidelity landscape shape") {
    std::vector<double> t_grid = {1, 2, 4, 6, 8};
    std::vector<double> r_grid = {1, 4, 16, 64};
    trotter::Landscape land = trotter::fidelity_landscape(2.0, 0.94, t_grid, r_grid);

    CHECK(land.cartan_high == doctest::Approx(std::pow(0.9921, 77)));
    CHECK(land.cartan_low == doctest::Approx(0.18));

    // Perfect gates: fidelity approaches 1 as r grows.
    trotter::Landscape ideal = trotter::fidelity_landscape(2.0, 0.94, {8.0}, r_grid, 1.0);
    CHECK(ideal.curve[0].f_max > 0.999);

    // The max-over-r curve never increases with t.
    for (std::size_t i = 1; i < land.curve.size(); ++i) {
        CHECK(land.curve[i].f_max <= land.curve[i - 1].f_max + 1e-12);
    }
    // At the target time the best Trotter fidelity sits below the
    // fast-forwarded reference band.
    CHECK(land.curve.back().t == doctest::Approx(8.0));
    CHECK(land.curve.back().f_max < land.cartan_high);

    // Every (t, r) entry multiplies out.
    for (const auto& p : land.grid) {
        CHECK(p.f_total == doctest::Approx(p.f_trotter * p.f_runtime));
        CHECK(p.f_trotter >= 0.0);
        CHECK(p.f_trotter <= 1.0);
    }
    CHECK(land.grid_csv().rfind("t,r,F_trotter,F_runtime,F_total\n", 0) == 0);
    CHECK(land.curve_csv().rfind("t,F_max,r_opt,cartan_low,cartan_high\n", 0) == 0);
    CHECK_THROWS_AS(trotter::fidelity_landscape(2.0, 0.94, {}, r_grid),
                    circuit::CircuitError);
}

TEST_CASE("circuit error and model error are the same oracle") {
    // trotter_error is defined through the compiled circuit, so the fitted
    // model and the circuit cannot drift apart.
    double direct = trotter::trotter_error(2.0, 0.94, 3.0, 8);
    PauliSum h = jw_aim_hamiltonian(AimParameters::half_filled_two_site(2.0, 0.94));
    dense::Matrix exact = dense::evolution_operator(dense::sum_matrix(h), 3.0);
    dense::Matrix circ =
        circuit::unitary_of(trotter::trotter2_circuit(2.0, 0.94, 3.0, 8));
    CHECK(direct == doctest::Approx((exact - circ).norm()));
}
