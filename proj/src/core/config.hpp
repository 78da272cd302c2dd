#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dmft.hpp"

// Run configuration shared by the CLI and the C API. Defaults mirror the
// reference workflow: V0 = 0.5, 8192 shots, two Cartan solutions, 150 time
// points, |dV| tolerance 0.02, CNOT depolarizing 0.0079, broadening 0.2.

namespace aimdmft::config {

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
    // Model selection.
    double u = 2.0;
    double v = 1.0;   // hybridization for decompose/greens
    double v0 = 0.5;  // loop initialization
    std::vector<double> u_list = {1, 2, 3, 4, 5, 7, 8, 10};

    // Measurement.
    bool exact = false;
    std::uint64_t shots = 8192;
    int solutions = 2;
    int time_points = 150;
    double eps_cnot = 0.0079;
    double readout_p10 = 0.0;
    double readout_p01 = 0.0;
    std::uint64_t seed = 1;

    // Loop.
    double tol = 0.02;
    int max_iter = 25;
    double mixing = 0.0;

    // Spectral analysis.
    double rate_multiplier = 5.0;
    double min_omega1 = 1e-3;
    int pad_factor = 4;
    int rerun_attempts = 3;

    // Spectral function and Trotter comparison.
    double eta = 0.2;
    double f_cnot = 0.9921;
    double t_target = 8.0;

    int jobs = 1;

    // Throws ConfigError for unknown keys or unparsable values.
    void set(const std::string& key, const std::string& value);
    std::string get(const std::string& key) const;

    // key = value lines; '#' starts a comment. Unknown keys rejected.
    static RunConfig from_text(const std::string& text);
    static RunConfig from_file(const std::string& path);

    std::string canonical_text() const;  // sorted key=value lines
    std::uint64_t hash() const;          // FNV-1a over canonical_text()

    // Header line carried by every emitted file.
    std::string file_header() const;

    sim::NoiseModel noise_model() const;
    spectral::Config spectral_config() const;
    spectral::MeasureConfig measure_config() const;
    dmft::LoopConfig loop_config() const;

    void validate() const;  // range checks
};

}  // namespace aimdmft::config
