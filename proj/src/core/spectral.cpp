#include "spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <sstream>

namespace aimdmft::spectral {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Stats {
    double mean;
    double sigma;
};

Stats masked_stats(const Spectrum& spec, const std::vector<bool>& masked) {
    double sum = 0.0, sum2 = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 2; k < spec.magnitudes.size(); ++k) {
        if (masked[k]) continue;
        sum += spec.magnitudes[k];
        sum2 += spec.magnitudes[k] * spec.magnitudes[k];
        ++count;
    }
    if (count == 0) return {0.0, 0.0};
    double mean = sum / static_cast<double>(count);
    double var = std::max(0.0, sum2 / static_cast<double>(count) - mean * mean);
    return {mean, std::sqrt(var)};
}

// Local maxima above `threshold` inside [lo, hi] bins, excluding masked bins
// and the window boundary bins (boundary-adjacent extraneous peaks are
// dropped).
std::vector<std::size_t> find_peaks(const Spectrum& spec, std::size_t lo,
                                    std::size_t hi, double threshold,
                                    const std::vector<bool>& masked) {
    std::vector<std::size_t> peaks;
    for (std::size_t k = std::max<std::size_t>(lo, 1) + 1; k + 1 <= hi; ++k) {
        if (k + 1 >= spec.magnitudes.size()) break;
        if (masked[k]) continue;
        double m = spec.magnitudes[k];
        if (m <= threshold) continue;
        if (m > spec.magnitudes[k - 1] && m >= spec.magnitudes[k + 1]) {
            peaks.push_back(k);
        }
    }
    return peaks;
}

// Quadratic refinement around the maximum bin; offset clamped to half a bin.
double refine_peak(const Spectrum& spec, std::size_t k) {
    double ym = spec.magnitudes[k - 1];
    double y0 = spec.magnitudes[k];
    double yp = spec.magnitudes[k + 1];
    double denom = ym - 2.0 * y0 + yp;
    double delta = 0.0;
    if (denom != 0.0) delta = 0.5 * (ym - yp) / denom;
    delta = std::clamp(delta, -0.5, 0.5);
    return (static_cast<double>(k) + delta) * spec.bin_width;
}

double spectrum_max(const Spectrum& spec) {
    double m = 0.0;
    for (double x : spec.magnitudes) m = std::max(m, x);
    return m;
}

}  // namespace

double GreensSeries::dt() const {
    if (times.size() < 2) throw PauliError("series too short");
    return times[1] - times[0];
}

std::string GreensSeries::to_csv() const {
    std::ostringstream out;
    out << "t,iG\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        out << format_double(times[i]) << "," << format_double(values[i]) << "\n";
    }
    return out.str();
}

std::string Spectrum::to_csv() const {
    std::ostringstream out;
    out << "omega,magnitude\n";
    for (std::size_t i = 0; i < frequencies.size(); ++i) {
        out << format_double(frequencies[i]) << "," << format_double(magnitudes[i])
            << "\n";
    }
    return out.str();
}

RatePlan plan_rates(const PeakPair& prev, const Config& cfg) {
    if (prev.omega2 <= 0.0) throw PauliError("need a positive omega2 estimate");
    double mult = std::clamp(cfg.rate_multiplier, 3.0, 10.0);
    double omega1 = prev.found1 ? prev.omega1 : 0.0;
    if (omega1 < cfg.min_omega1) omega1 = cfg.min_omega1;  // insulating fallback

    RatePlan plan;
    plan.omega_s_high = mult * prev.omega2;
    plan.omega_s_low = mult * omega1;

    // When the aliased Hubbard-band image would fall inside the quasiparticle
    // search window, move the low rate within the allowed [3,10] band so the
    // image lands on the Nyquist edge (omega2 = (k + 1/2) omega_s), where it
    // is trivially discarded.
    if (prev.omega2 - omega1 > 0.5 * omega1) {
        double image = alias_frequency(prev.omega2, plan.omega_s_low);
        if (std::abs(image - omega1) < 0.5 * omega1) {
            double best = plan.omega_s_low;
            double best_gap = std::abs(best - mult * omega1) + 100.0 * omega1;
            int k_max = static_cast<int>(prev.omega2 / (3.0 * omega1)) + 1;
            for (int k = 0; k <= k_max; ++k) {
                double ws = prev.omega2 / (static_cast<double>(k) + 0.5);
                if (ws < 3.0 * omega1 || ws > 10.0 * omega1) continue;
                double gap = std::abs(ws - mult * omega1);
                if (gap < best_gap) {
                    best_gap = gap;
                    best = ws;
                }
            }
            plan.omega_s_low = best;
        }
    }
    plan.dt_high = 2.0 * M_PI / plan.omega_s_high;
    plan.dt_low = 2.0 * M_PI / plan.omega_s_low;
    return plan;
}

double alias_frequency(double omega, double omega_s) {
    if (omega_s <= 0.0) throw PauliError("sampling frequency must be positive");
    double x = omega / omega_s;
    double nint = std::ceil(std::floor(2.0 * x) / 2.0);  // round half up
    return std::abs(omega - omega_s * nint);
}

Spectrum dft_spectrum(const GreensSeries& series, const Config& cfg) {
    const std::size_t n = series.values.size();
    if (n < 2) throw PauliError("series too short for a spectrum");
    const double dt = series.times[1] - series.times[0];
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(series.times[i] - series.times[i - 1] - dt) > 1e-12 * std::max(1.0, dt)) {
            throw PauliError("non-uniform time series");
        }
    }
    const std::size_t m = n * static_cast<std::size_t>(std::max(1, cfg.pad_factor));
    const std::size_t bins = m / 2 + 1;

    // Remove the series mean before padding; otherwise the zero-padded
    // rectangle leaks the DC weight across the whole grid.
    double mean = 0.0;
    for (double v : series.values) mean += v;
    mean /= static_cast<double>(n);

    Spectrum spec;
    spec.bin_width = 2.0 * M_PI / (static_cast<double>(m) * dt);
    spec.frequencies.resize(bins);
    spec.magnitudes.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        spec.frequencies[k] = static_cast<double>(k) * spec.bin_width;
        std::complex<double> acc = 0.0;
        const double w = -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(m);
        for (std::size_t j = 0; j < n; ++j) {
            acc += (series.values[j] - mean) *
                   std::complex<double>(std::cos(w * static_cast<double>(j)),
                                        std::sin(w * static_cast<double>(j)));
        }
        spec.magnitudes[k] = std::abs(acc);
    }
    // Spurious omega = 0 peaks removed: DC and near-DC bins zeroed.
    for (std::size_t k = 0; k < bins && k < 2; ++k) spec.magnitudes[k] = 0.0;
    return spec;
}

double detect_omega2(const Spectrum& spec, double expected_omega2,
                     double expected_omega1, const Config& cfg, double* amp_rel) {
    const std::size_t bins = spec.magnitudes.size();
    std::vector<bool> masked(bins, false);
    // The expected quasiparticle region is masked off: everything below the
    // midpoint between the two expected frequencies is out of bounds, unless
    // they coincide (degenerate free-model case).
    const bool degenerate =
        std::abs(expected_omega2 - expected_omega1) <= 4.0 * spec.bin_width;
    if (!degenerate) {
        double midpoint = 0.5 * (expected_omega1 + expected_omega2);
        for (std::size_t k = 0; k < bins; ++k) {
            if (spec.frequencies[k] <= midpoint) masked[k] = true;
        }
    }
    Stats st = masked_stats(spec, masked);
    const double threshold = st.mean + 2.0 * st.sigma;

    for (double wf : cfg.window_fractions) {
        auto lo = static_cast<std::size_t>(
            std::max(2.0, std::floor(expected_omega2 * (1.0 - wf) / spec.bin_width)));
        auto hi = static_cast<std::size_t>(
            std::min(static_cast<double>(bins - 2),
                     std::ceil(expected_omega2 * (1.0 + wf) / spec.bin_width)));
        if (lo >= hi) continue;
        std::vector<std::size_t> peaks = find_peaks(spec, lo, hi, threshold, masked);
        if (peaks.empty()) continue;
        // Up to the two most prominent candidates; pick the higher one.
        std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) {
            return spec.magnitudes[a] > spec.magnitudes[b];
        });
        std::size_t best = peaks[0];
        if (amp_rel) *amp_rel = spec.magnitudes[best] / spectrum_max(spec);
        return refine_peak(spec, best);
    }
    throw RerunSignal("no omega2 peak above mean + 2 sigma in any search window");
}

double detect_omega1(const Spectrum& spec, double expected_omega1, double omega2,
                     double omega_s, const Config& cfg, double* amp_rel) {
    const std::size_t bins = spec.magnitudes.size();
    std::vector<bool> masked(bins, false);
    const double alias = alias_frequency(omega2, omega_s);
    const bool degenerate = std::abs(alias - expected_omega1) <= 2.0 * spec.bin_width;
    // Discard the aliased Hubbard-band image, except when it coincides with
    // the expected quasiparticle frequency (degenerate free-model case).
    if (!degenerate) {
        for (std::size_t k = 0; k < bins; ++k) {
            if (std::abs(spec.frequencies[k] - alias) <= spec.bin_width) {
                masked[k] = true;
            }
        }
    }
    // The threshold statistics additionally exclude the image's leakage
    // skirt, which would otherwise dominate mean and sigma.
    std::vector<bool> stats_mask = masked;
    if (!degenerate) {
        double skirt = std::max(spec.bin_width, 0.10 * spec.nyquist());
        for (std::size_t k = 0; k < bins; ++k) {
            if (std::abs(spec.frequencies[k] - alias) <= skirt) stats_mask[k] = true;
        }
    }
    Stats st = masked_stats(spec, stats_mask);
    // The window never reaches into the Hubbard-band half of the spectrum.
    double cap = degenerate ? spec.nyquist()
                            : 0.5 * (expected_omega1 + std::min(omega2, spec.nyquist()));

    for (double wf : cfg.window_fractions) {
        auto lo = static_cast<std::size_t>(
            std::max(2.0, std::floor(expected_omega1 * (1.0 - wf) / spec.bin_width)));
        auto hi = static_cast<std::size_t>(
            std::min({static_cast<double>(bins - 2), cap / spec.bin_width,
                      std::ceil(expected_omega1 * (1.0 + wf) / spec.bin_width)}));
        if (lo >= hi) continue;
        // Escalating ladder: above mean, then +1 sigma, then +2 sigma. A
        // stage with one or two peaks wins; too many (or none) escalates.
        for (int stage = 0; stage < 3; ++stage) {
            double threshold = st.mean + static_cast<double>(stage) * st.sigma;
            std::vector<std::size_t> peaks =
                find_peaks(spec, lo, hi, threshold, masked);
            if (peaks.size() >= 1 && peaks.size() <= 2) {
                std::size_t best = peaks[0];
                if (peaks.size() == 2 && spec.magnitudes[peaks[1]] > spec.magnitudes[best]) {
                    best = peaks[1];
                }
                if (amp_rel) *amp_rel = spec.magnitudes[best] / spectrum_max(spec);
                return refine_peak(spec, best);
            }
        }
    }
    throw RerunSignal("omega1 ladder exhausted without a qualifying peak");
}

GreensSeries measure_series(const std::vector<cartan::CartanSolution>& solutions,
                            double theta_gs, double dt, const std::string& rate_tag,
                            const MeasureConfig& cfg, const Config& scfg) {
    if (solutions.empty()) throw PauliError("need at least one Cartan solution");
    GreensSeries series;
    series.rate_tag = rate_tag;
    series.times.resize(static_cast<std::size_t>(scfg.samples));
    series.values.assign(static_cast<std::size_t>(scfg.samples), 0.0);
    for (int i = 0; i < scfg.samples; ++i) {
        series.times[static_cast<std::size_t>(i)] = dt * static_cast<double>(i);
    }

    const bool noisy_gates = !cfg.exact && !cfg.noise.ideal_gates();
    std::uint64_t draw = 0;
    for (std::size_t s = 0; s < solutions.size(); ++s) {
        const auto& sol = solutions[s];
        sim::QuantumState prefix_state = sim::initial_state(5, noisy_gates);
        sim::apply(prefix_state, circuit::greens_prefix(sol, theta_gs),
                   cfg.exact ? nullptr : &cfg.noise);
        for (int i = 0; i < scfg.samples; ++i) {
            sim::QuantumState state = prefix_state;
            sim::apply(state, circuit::greens_suffix(sol, series.times[static_cast<std::size_t>(i)]),
                       cfg.exact ? nullptr : &cfg.noise);
            double value;
            if (cfg.exact) {
                std::vector<double> probs = state.probabilities();
                sim::post_select_distribution(probs);
                value = sim::ancilla_expectation(probs, circuit::kGreensAncilla);
            } else {
                sim::ShotRecord rec = sim::sample_shots(
                    state, cfg.shots, cfg.noise,
                    cfg.seed + 0x9e3779b97f4a7c15ULL * (++draw));
                std::vector<double> probs = sim::mitigate_readout(rec, 5, cfg.noise);
                sim::post_select_distribution(probs);
                value = sim::ancilla_expectation(probs, circuit::kGreensAncilla);
            }
            series.values[static_cast<std::size_t>(i)] += value;
        }
    }
    for (double& v : series.values) v /= static_cast<double>(solutions.size());
    return series;
}

}  // namespace aimdmft::spectral
