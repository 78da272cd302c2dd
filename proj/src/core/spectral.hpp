#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "circuit.hpp"
#include "sim.hpp"

// Green's-function sampling at two rates, discrete Fourier spectra, alias
// resolution, and the staged peak criteria for the quasiparticle (omega1)
// and Hubbard-band (omega2) frequencies.

namespace aimdmft::spectral {

// Detection found nothing qualifying; the caller reruns the measurement with
// a fresh seed (capped) before treating the peak as vanished.
class RerunSignal : public std::runtime_error {
  public:
    explicit RerunSignal(const std::string& what) : std::runtime_error(what) {}
};

struct GreensSeries {
    std::vector<double> times;   // uniform, starting at 0
    std::vector<double> values;  // iG(t) estimates
    std::string rate_tag;        // "high" or "low"

    double dt() const;
    std::string to_csv() const;  // t,iG
};

struct Spectrum {
    std::vector<double> frequencies;  // omega >= 0 grid
    std::vector<double> magnitudes;
    double bin_width = 0.0;

    double nyquist() const { return frequencies.empty() ? 0.0 : frequencies.back(); }
    std::string to_csv() const;  // omega,magnitude
};

struct PeakPair {
    double omega1 = 0.0;
    double omega2 = 0.0;
    bool found1 = false;
    double amp1_rel = 0.0;  // peak magnitude / spectrum maximum
    double amp2_rel = 0.0;
};

struct Config {
    double rate_multiplier = 5.0;  // sampling rate = multiplier * target, in [3,10]
    int samples = 150;
    int pad_factor = 4;
    double min_omega1 = 1e-3;  // low-rate fallback when omega1 vanished
    std::vector<double> window_fractions = {0.25, 0.5, 1.0};
    int rerun_attempts = 3;
};

struct RatePlan {
    double dt_high = 0.0;
    double dt_low = 0.0;
    double omega_s_high = 0.0;  // angular sampling frequency 2 pi / dt
    double omega_s_low = 0.0;
};

// Sampling rates from the previous iteration's peaks (or the analytic
// initialization on iteration 1).
RatePlan plan_rates(const PeakPair& prev, const Config& cfg = {});

// Eq.-style alias: |omega - omega_s * NINT(omega / omega_s)| with
// round-half-up NINT(x) = ceil(floor(2x)/2); result in [0, omega_s/2].
double alias_frequency(double omega, double omega_s);

// Magnitude spectrum of the real series with 4x zero padding; DC and
// near-DC bins (k < 2) zeroed. Throws on a non-uniform series.
Spectrum dft_spectrum(const GreensSeries& series, const Config& cfg = {});

// Hubbard-band peak: window grows around the expected omega2 while the
// expected omega1 region stays masked; candidates must clear mean + 2 sigma.
// Returns the refined frequency; relative magnitude via `amp_rel`.
double detect_omega2(const Spectrum& spec, double expected_omega2,
                     double expected_omega1, const Config& cfg = {},
                     double* amp_rel = nullptr);

// Quasiparticle peak: masks the aliased image of omega2, then applies the
// escalating threshold ladder (mean, +1 sigma, +2 sigma) inside a growing
// window. Throws RerunSignal when every stage fails.
double detect_omega1(const Spectrum& spec, double expected_omega1, double omega2,
                     double omega_s, const Config& cfg = {},
                     double* amp_rel = nullptr);

struct MeasureConfig {
    bool exact = true;  // noiseless infinite-shot expectations
    std::uint64_t shots = 8192;
    sim::NoiseModel noise;
    std::uint64_t seed = 1;
};

// Measured iG(t) on a uniform grid: per time point and Cartan solution,
// build the circuit, run, mitigate readout, post-select, take <Z_a>;
// expectations averaged across solutions with equal weight.
GreensSeries measure_series(const std::vector<cartan::CartanSolution>& solutions,
                            double theta_gs, double dt, const std::string& rate_tag,
                            const MeasureConfig& cfg, const Config& scfg = {});

}  // namespace aimdmft::spectral
