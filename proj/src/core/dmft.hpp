#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spectral.hpp"

// Self-consistency layer: quasiparticle weight, pole amplitudes, local
// spectral function, the V -> sqrt(Z) update loop, and the phase-diagram
// sweep against the exact two-site result Z = 1 - (U/6)^2 (0 above U_c = 6).

namespace aimdmft::dmft {

class InvalidGeometry : public std::runtime_error {
  public:
    explicit InvalidGeometry(const std::string& what) : std::runtime_error(what) {}
};

class DetectionFailure : public std::runtime_error {
  public:
    explicit DetectionFailure(const std::string& what) : std::runtime_error(what) {}
};

// Z = w1^2 w2^2 / (V^2 (w1^2 + w2^2 - V^2)); amplitude-free by construction.
double quasiparticle_weight(double omega1, double omega2, double v);

struct Amplitudes {
    double alpha1;
    double alpha2;
};

// alpha2 = ((w1/V)^2 - 1) / (2 [(w1/w2)^2 - 1]), alpha1 = 1/2 - alpha2.
Amplitudes amplitudes(double omega1, double omega2, double v);

struct SelfEnergyModel {
    double omega1 = 0.0;
    double omega2 = 0.0;
    double v = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
};

struct SpectralCurve {
    std::vector<double> omega;
    std::vector<double> density;

    std::string to_csv() const;  // omega,A
};

// A(omega) = -(1/pi) Im G(omega + i eta) from the four-pole Green's function.
SpectralCurve spectral_function(const SelfEnergyModel& model, double eta = 0.2,
                                double omega_max = 8.0, int points = 801);

double z_exact(double u);  // 1 - (U/6)^2 below U_c = 6, else 0

enum class Termination { tolerance, max_iter, omega1_not_found };

const char* termination_name(Termination t);

struct IterationRecord {
    int iteration = 0;
    double v_in = 0.0;
    double omega1 = 0.0;
    double omega2 = 0.0;
    bool omega1_found = false;
    double z_raw = 0.0;
    bool z_clamped = false;  // Z > 1 recorded but clamped for the V update
    double v_new = 0.0;
    int reruns = 0;
};

struct DmftState {
    double u = 0.0;
    double v0 = 0.0;
    std::vector<IterationRecord> history;
    bool converged = false;
    Termination reason = Termination::max_iter;
    double v_final = 0.0;  // average of the final two accepted steps
    double z_final = 0.0;  // v_final^2

    std::string history_csv() const;
};

struct LoopConfig {
    double tol = 0.02;
    int max_iter = 25;
    int n_solutions = 2;  // randomized Cartan solutions per measurement
    double mixing = 0.0;  // optional linear mixing of the V update, off by default
    std::uint64_t seed = 1;
    spectral::Config spectral;
    spectral::MeasureConfig measure;  // exact by default
};

// The loop of the flow diagram: group analysis once, per-iteration Cartan
// re-solve, two-rate measurement, omega2 then omega1, Z, V <- sqrt(Z).
DmftState dmft_iterate(double u, double v0, const LoopConfig& cfg);

struct PhasePoint {
    double u = 0.0;
    double z_final = 0.0;
    double z_ref = 0.0;
    int iterations = 0;
    Termination reason = Termination::max_iter;
    bool converged = false;
    bool failed = false;  // hard error; message below
    std::string error;
    DmftState state;  // full per-iteration history
};

// Independent dmft_iterate per U (parallel when jobs > 1); per-U failures
// recorded and the sweep continues.
std::vector<PhasePoint> phase_diagram(const std::vector<double>& u_list,
                                      const LoopConfig& cfg, int jobs = 1);

std::string phase_table_csv(const std::vector<PhasePoint>& points);

}  // namespace aimdmft::dmft
