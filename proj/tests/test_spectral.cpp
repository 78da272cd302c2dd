#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "core/cartan.hpp"
#include "core/ed.hpp"
#include "core/spectral.hpp"

using namespace aimdmft;

namespace {

spectral::GreensSeries synth(double dt, int n,
                             const std::vector<std::pair<double, double>>& tones) {
    spectral::GreensSeries s;
    s.rate_tag = "synthetic";
    for (int i = 0; i < n; ++i) {
        double t = dt * i;
        double v = 0.0;
        for (auto [amp, omega] : tones) v += amp * std::cos(omega * t);
        s.times.push_back(t);
        s.values.push_back(v);
    }
    return s;
}

std::size_t argmax(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

}  // namespace

TEST_CASE("rate planning policy") {
    spectral::Config cfg;
    spectral::PeakPair prev{0.884, 4.0, true, 0.3, 0.2};
    spectral::RatePlan plan = spectral::plan_rates(prev, cfg);
    CHECK(plan.omega_s_high == doctest::Approx(20.0));
    CHECK(plan.dt_high == doctest::Approx(2.0 * M_PI / 20.0));
    // Low rate: the default 5x policy, dt = 2 pi / (5 * 0.884) ~ 1.421.
    CHECK(plan.dt_low == doctest::Approx(1.4213).epsilon(1e-3));
    // Nyquist above the respective targets, and 150 samples cover >= 3
    // periods of each.
    CHECK(M_PI / plan.dt_high > prev.omega2);
    CHECK(M_PI / plan.dt_low > prev.omega1);
    CHECK(150.0 * plan.dt_high * prev.omega2 / (2.0 * M_PI) >= 3.0);
    CHECK(150.0 * plan.dt_low * prev.omega1 / (2.0 * M_PI) >= 3.0);

    // Vanished omega1 falls back to the configured floor.
    spectral::PeakPair gone{0.0, 4.0, false, 0.0, 0.5};
    spectral::RatePlan fallback = spectral::plan_rates(gone, cfg);
    CHECK(fallback.omega_s_low >= 3.0 * cfg.min_omega1);
    CHECK(fallback.omega_s_low <= 10.0 * cfg.min_omega1 + 1e-12);

    CHECK_THROWS_AS(spectral::plan_rates({0.1, 0.0, true, 0, 0}, cfg), PauliError);
}

TEST_CASE("alias collision steers the low rate inside the band") {
    spectral::Config cfg;
    // omega2 aliases right onto omega1 under the plain 5x rule.
    spectral::PeakPair prev{0.0893, 4.113, true, 0.03, 0.47};
    spectral::RatePlan plan = spectral::plan_rates(prev, cfg);
    CHECK(plan.omega_s_low >= 3.0 * prev.omega1 - 1e-12);
    CHECK(plan.omega_s_low <= 10.0 * prev.omega1 + 1e-12);
    double image = spectral::alias_frequency(prev.omega2, plan.omega_s_low);
    CHECK(std::abs(image - prev.omega1) > 0.4 * prev.omega1);
}

TEST_CASE("alias frequency formula") {
    CHECK(spectral::alias_frequency(4.0, 3.0) == doctest::Approx(1.0));
    CHECK(spectral::alias_frequency(1.0, 4.0) == doctest::Approx(1.0));
    // Half-sample edge: NINT(0.5) rounds up to 1.
    CHECK(spectral::alias_frequency(2.0, 4.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(spectral::alias_frequency(1.0, 0.0), PauliError);
}

TEST_CASE("alias lands where the dense DFT of a sampled cosine peaks") {
    std::mt19937_64 rng(2022);
    std::uniform_real_distribution<double> wpick(0.05, 20.0);
    spectral::Config cfg;
    for (int trial = 0; trial < 100; ++trial) {
        double omega = wpick(rng);
        double omega_s = wpick(rng);
        double alias = spectral::alias_frequency(omega, omega_s);
        CHECK(alias >= -1e-12);
        CHECK(alias <= omega_s / 2 + 1e-12);

        spectral::GreensSeries s =
            synth(2.0 * M_PI / omega_s, 150, {{1.0, omega}});
        spectral::Spectrum spec = spectral::dft_spectrum(s, cfg);
        // Skip aliases buried in the zeroed DC bins or at the very edge.
        double lo = 3.0 * spec.bin_width;
        if (alias < lo || alias > spec.nyquist() - lo) continue;
        std::size_t peak = argmax(spec.magnitudes);
        CHECK(std::abs(spec.frequencies[peak] - alias) <= spec.bin_width);
    }
}

TEST_CASE("spectrum of a clean cosine peaks at the right bin") {
    spectral::Config cfg;
    spectral::GreensSeries s = synth(0.1, 150, {{1.0, 7.3}});
    spectral::Spectrum spec = spectral::dft_spectrum(s, cfg);
    std::size_t peak = argmax(spec.magnitudes);
    CHECK(std::abs(spec.frequencies[peak] - 7.3) <= spec.bin_width);
}

TEST_CASE("two-pole synthetic spectrum shows both peaks with the right ratio") {
    ed::TwoPole p = ed::two_pole(ed::lehmann(2.0, 0.944));
    spectral::Config cfg;
    double dt = 2.0 * M_PI / (5.0 * p.omega2);
    spectral::GreensSeries s =
        synth(dt, 150, {{2.0 * p.alpha1, p.omega1}, {2.0 * p.alpha2, p.omega2}});
    spectral::Spectrum spec = spectral::dft_spectrum(s, cfg);

    auto mag_at = [&](double omega) {
        std::size_t k = static_cast<std::size_t>(omega / spec.bin_width + 0.5);
        double best = 0.0;
        for (std::size_t j = k > 3 ? k - 3 : 0; j <= k + 3; ++j) {
            best = std::max(best, spec.magnitudes[j]);
        }
        return best;
    };
    double m1 = mag_at(p.omega1);
    double m2 = mag_at(p.omega2);
    CHECK(m1 > 0.0);
    CHECK(m2 > 0.0);
    CHECK(m1 / m2 == doctest::Approx(p.alpha1 / p.alpha2).epsilon(0.1));
}

TEST_CASE("constant series is empty after DC removal") {
    spectral::Config cfg;
    spectral::GreensSeries s = synth(0.2, 150, {});
    for (double& v : s.values) v = 0.7;
    spectral::Spectrum spec = spectral::dft_spectrum(s, cfg);
    for (double m : spec.magnitudes) CHECK(m < 1e-9);
}

TEST_CASE("non-uniform series is rejected") {
    spectral::GreensSeries s = synth(0.2, 150, {{1.0, 3.0}});
    s.times[40] += 0.05;
    CHECK_THROWS_AS(spectral::dft_spectrum(s, {}), PauliError);
}

TEST_CASE("omega2 detection") {
    spectral::Config cfg;
    // Converged U = 8: omega2 = U/2 = 4 within one bin.
    ed::TwoPole p8 = ed::two_pole(ed::lehmann(8.0, 0.116));
    double dt = 2.0 * M_PI / (5.0 * p8.omega2);
    spectral::GreensSeries s =
        synth(dt, 150, {{2.0 * p8.alpha1, p8.omega1}, {2.0 * p8.alpha2, p8.omega2}});
    spectral::Spectrum spec = spectral::dft_spectrum(s, cfg);
    double w2 = spectral::detect_omega2(spec, p8.omega2, p8.omega1, cfg);
    CHECK(std::abs(w2 - 4.0) <= 2.0 * p8.omega2 / 4.0 * 0.02);  // loose sanity
    CHECK(std::abs(w2 - p8.omega2) <= spec.bin_width);

    // Noiseless U = 2: matches the larger Lehmann pole within one bin.
    ed::TwoPole p2 = ed::two_pole(ed::lehmann(2.0, 0.944));
    double dt2 = 2.0 * M_PI / (5.0 * p2.omega2);
    spectral::GreensSeries s2 =
        synth(dt2, 150, {{2.0 * p2.alpha1, p2.omega1}, {2.0 * p2.alpha2, p2.omega2}});
    spectral::Spectrum spec2 = spectral::dft_spectrum(s2, cfg);
    double w22 = spectral::detect_omega2(spec2, p2.omega2, p2.omega1, cfg);
    CHECK(std::abs(w22 - p2.omega2) <= spec2.bin_width);

    // A flat spectrum has no local maxima above mean + 2 sigma.
    spectral::Spectrum flat_spec = spec2;
    for (double& m : flat_spec.magnitudes) m = 1.0;
    flat_spec.magnitudes[0] = flat_spec.magnitudes[1] = 0.0;
    CHECK_THROWS_AS(spectral::detect_omega2(flat_spec, p2.omega2, p2.omega1, cfg),
                    spectral::RerunSignal);
}

TEST_CASE("peak detection is scale invariant") {
    spectral::Config cfg;
    ed::TwoPole p = ed::two_pole(ed::lehmann(2.0, 0.944));
    double dt = 2.0 * M_PI / (5.0 * p.omega2);
    spectral::GreensSeries s =
        synth(dt, 150, {{2.0 * p.alpha1, p.omega1}, {2.0 * p.alpha2, p.omega2}});
    spectral::Spectrum spec = spectral::dft_spectrum(s, cfg);
    double w2 = spectral::detect_omega2(spec, p.omega2, p.omega1, cfg);
    for (double& m : spec.magnitudes) m *= 531.7;
    CHECK(spectral::detect_omega2(spec, p.omega2, p.omega1, cfg) ==
          doctest::Approx(w2));
}

TEST_CASE("omega1 detection near the U = 2 fixed point") {
    spectral::Config cfg;
    ed::TwoPole p = ed::two_pole(ed::lehmann(2.0, 0.944));
    spectral::PeakPair prev{p.omega1, p.omega2, true, p.alpha1, p.alpha2};
    spectral::RatePlan plan = spectral::plan_rates(prev, cfg);
    spectral::GreensSeries s = synth(
        plan.dt_low, 150, {{2.0 * p.alpha1, p.omega1}, {2.0 * p.alpha2, p.omega2}});
    spectral::Spectrum spec = spectral::dft_spectrum(s, cfg);
    double w1 = spectral::detect_omega1(spec, p.omega1, p.omega2,
                                        plan.omega_s_low, cfg);
    CHECK(std::abs(w1 - 0.884) <= spec.bin_width + 1e-3);
    CHECK(std::abs(w1 - p.omega1) <= spec.bin_width);
}

TEST_CASE("vanished quasiparticle amplitude exhausts the ladder") {
    spectral::Config cfg;
    // alpha1 = 0: only the aliased Hubbard image remains, which is masked.
    double omega1_exp = 0.12, omega2 = 4.0;
    double omega_s = 5.0 * omega1_exp;
    // Steer clear of the expected window so the mask applies.
    double alias = spectral::alias_frequency(omega2, omega_s);
    spectral::GreensSeries s = synth(2.0 * M_PI / omega_s, 150, {{1.0, omega2}});
    spectral::Spectrum spec = spectral::dft_spectrum(s, cfg);
    if (std::abs(alias - omega1_exp) > 2.0 * spec.bin_width) {
        CHECK_THROWS_AS(
            spectral::detect_omega1(spec, omega1_exp, omega2, omega_s, cfg),
            spectral::RerunSignal);
    }

    // Pure silence fails the ladder as well.
    spectral::GreensSeries quiet = synth(2.0 * M_PI / omega_s, 150, {});
    spectral::Spectrum quiet_spec = spectral::dft_spectrum(quiet, cfg);
    CHECK_THROWS_AS(
        spectral::detect_omega1(quiet_spec, omega1_exp, omega2, omega_s, cfg),
        spectral::RerunSignal);
}

TEST_CASE("measured series reproduces the Lehmann form exactly") {
    double u = 2.0, v = 0.944;
    PauliSum h = jw_aim_hamiltonian(AimParameters::half_filled_two_site(u, v));
    lie::Decomposition dec = lie::analyze(h);
    std::vector<cartan::CartanSolution> sols = {
        cartan::solve_with_retries(h, dec, 4), cartan::solve_with_retries(h, dec, 8)};
    double theta = circuit::optimize_ansatz_angle(u, v);
    ed::Spectrum poles = ed::lehmann(u, v);

    spectral::Config scfg;
    scfg.samples = 40;  // enough for the comparison
    spectral::MeasureConfig mc;
    mc.exact = true;
    spectral::GreensSeries s =
        spectral::measure_series(sols, theta, 0.31, "high", mc, scfg);
    CHECK(s.values[0] == doctest::Approx(1.0));  // t = 0 sum rule
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        CHECK(s.values[i] == doctest::Approx(poles.greens(s.times[i])).epsilon(1e-8));
    }

    // Single-solution run equals the two-solution average without noise.
    spectral::GreensSeries one = spectral::measure_series(
        {sols[0]}, theta, 0.31, "high", mc, scfg);
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        CHECK(one.values[i] == doctest::Approx(s.values[i]).epsilon(1e-9));
    }
}

TEST_CASE("series and spectrum CSV round shape") {
    spectral::GreensSeries s = synth(0.25, 10, {{1.0, 2.0}});
    std::string csv = s.to_csv();
    CHECK(csv.rfind("t,iG\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
    spectral::Spectrum spec = spectral::dft_spectrum(s, {});
    std::string scsv = spec.to_csv();
    CHECK(scsv.rfind("omega,magnitude\n", 0) == 0);
}
