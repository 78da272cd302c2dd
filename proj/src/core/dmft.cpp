#include "dmft.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "cartan.hpp"
#include "ed.hpp"

namespace aimdmft::dmft {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

double quasiparticle_weight(double omega1, double omega2, double v) {
    if (v == 0.0) throw InvalidGeometry("V must be nonzero");
    double denom = v * v * (omega1 * omega1 + omega2 * omega2 - v * v);
    if (denom <= 0.0) {
        throw InvalidGeometry("frequencies inconsistent with a physical pole structure");
    }
    return omega1 * omega1 * omega2 * omega2 / denom;
}

Amplitudes amplitudes(double omega1, double omega2, double v) {
    if (v == 0.0) throw InvalidGeometry("V must be nonzero");
    if (omega1 == omega2) throw InvalidGeometry("degenerate poles");
    double r1 = omega1 / v;
    double r12 = omega1 / omega2;
    double alpha2 = (r1 * r1 - 1.0) / (2.0 * (r12 * r12 - 1.0));
    return {0.5 - alpha2, alpha2};
}

std::string SpectralCurve::to_csv() const {
    std::ostringstream out;
    out << "omega,A\n";
    for (std::size_t i = 0; i < omega.size(); ++i) {
        out << format_double(omega[i]) << "," << format_double(density[i]) << "\n";
    }
    return out.str();
}

SpectralCurve spectral_function(const SelfEnergyModel& model, double eta,
                                double omega_max, int points) {
    SpectralCurve curve;
    curve.omega.resize(static_cast<std::size_t>(points));
    curve.density.resize(static_cast<std::size_t>(points));
    auto lorentz = [eta](double w, double w0) {
        return eta / ((w - w0) * (w - w0) + eta * eta);
    };
    for (int i = 0; i < points; ++i) {
        double w = -omega_max + 2.0 * omega_max * i / (points - 1);
        double a = model.alpha1 * (lorentz(w, model.omega1) + lorentz(w, -model.omega1)) +
                   model.alpha2 * (lorentz(w, model.omega2) + lorentz(w, -model.omega2));
        curve.omega[static_cast<std::size_t>(i)] = w;
        curve.density[static_cast<std::size_t>(i)] = a / M_PI;
    }
    return curve;
}

double z_exact(double u) {
    if (u >= 6.0) return 0.0;
    return 1.0 - (u / 6.0) * (u / 6.0);
}

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::tolerance: return "tolerance";
        case Termination::max_iter: return "max_iter";
        case Termination::omega1_not_found: return "omega1_not_found";
    }
    return "?";
}

std::string DmftState::history_csv() const {
    std::ostringstream out;
    out << "iteration,V,omega1,omega2,Z,V_new,omega1_found,z_clamped,reruns\n";
    for (const IterationRecord& r : history) {
        out << r.iteration << "," << format_double(r.v_in) << ","
            << format_double(r.omega1) << "," << format_double(r.omega2) << ","
            << format_double(r.z_raw) << "," << format_double(r.v_new) << ","
            << (r.omega1_found ? 1 : 0) << "," << (r.z_clamped ? 1 : 0) << ","
            << r.reruns << "\n";
    }
    return out.str();
}

DmftState dmft_iterate(double u, double v0, const LoopConfig& cfg) {
    if (v0 <= 0.0) throw InvalidGeometry("V0 must be positive");
    DmftState state;
    state.u = u;
    state.v0 = v0;

    // Group analysis happens once: the algebra string sets do not depend on
    // the specific nonzero values of U and V.
    PauliSum h0 = jw_aim_hamiltonian(AimParameters::half_filled_two_site(
        u == 0.0 ? 1.0 : u, v0));
    lie::Decomposition dec = lie::analyze(h0);

    double v = v0;
    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        PauliSum ham = jw_aim_hamiltonian(AimParameters::half_filled_two_site(u, v));
        std::vector<cartan::CartanSolution> sols;
        for (int s = 0; s < cfg.n_solutions; ++s) {
            sols.push_back(cartan::solve_with_retries(
                ham, dec, mix_seed(cfg.seed, 1000 * static_cast<std::uint64_t>(iter) + s)));
        }
        double theta = circuit::optimize_ansatz_angle(u, v);

        // Search windows and sampling rates come from the analytic poles of
        // the current-V model (V is classical knowledge at every step; the
        // measured spectra alone decide the detected frequencies).
        spectral::PeakPair prev;
        {
            ed::TwoPole poles = ed::two_pole(ed::lehmann(u, v));
            prev.omega1 = poles.omega1;
            prev.omega2 = poles.omega2;
            prev.found1 = poles.alpha1 > 1e-9;
            prev.amp1_rel = poles.alpha1;
            prev.amp2_rel = poles.alpha2;
        }

        IterationRecord rec;
        rec.iteration = iter;
        rec.v_in = v;

        bool found1 = false;
        double omega1 = 0.0, omega2 = 0.0;
        bool have2 = false;
        for (int attempt = 0; attempt < cfg.spectral.rerun_attempts; ++attempt) {
            spectral::RatePlan plan = spectral::plan_rates(prev, cfg.spectral);
            spectral::MeasureConfig mc = cfg.measure;
            mc.seed = mix_seed(cfg.seed, 40000 + 97 * static_cast<std::uint64_t>(iter) +
                                             2 * static_cast<std::uint64_t>(attempt));
            spectral::GreensSeries high =
                spectral::measure_series(sols, theta, plan.dt_high, "high", mc, cfg.spectral);
            spectral::Spectrum spec_h = spectral::dft_spectrum(high, cfg.spectral);
            try {
                double amp2 = 0.0;
                omega2 = spectral::detect_omega2(spec_h, prev.omega2, prev.omega1,
                                                 cfg.spectral, &amp2);
                have2 = true;
            } catch (const spectral::RerunSignal&) {
                ++rec.reruns;
                continue;
            }
            mc.seed += 1;
            spectral::GreensSeries low =
                spectral::measure_series(sols, theta, plan.dt_low, "low", mc, cfg.spectral);
            spectral::Spectrum spec_l = spectral::dft_spectrum(low, cfg.spectral);
            double expected1 = prev.found1 ? std::max(prev.omega1, cfg.spectral.min_omega1)
                                           : cfg.spectral.min_omega1;
            try {
                double amp1 = 0.0;
                omega1 = spectral::detect_omega1(spec_l, expected1, omega2,
                                                 plan.omega_s_low, cfg.spectral, &amp1);
                found1 = true;
                break;
            } catch (const spectral::RerunSignal&) {
                ++rec.reruns;
            }
        }

        if (!have2) {
            throw DetectionFailure("omega2 detection failed after " +
                                   std::to_string(cfg.spectral.rerun_attempts) +
                                   " attempts at U = " + std::to_string(u));
        }
        rec.omega2 = omega2;
        if (!found1) {
            // The quasiparticle amplitude has vanished below the detection
            // ladder; terminate and report Z at its current floor.
            rec.omega1_found = false;
            rec.v_new = v;
            state.history.push_back(rec);
            state.reason = Termination::omega1_not_found;
            break;
        }
        rec.omega1 = omega1;
        rec.omega1_found = true;

        double z_raw = quasiparticle_weight(omega1, omega2, v);
        rec.z_raw = z_raw;
        double z_used = z_raw;
        if (z_used > 1.0) {
            z_used = 1.0;
            rec.z_clamped = true;
        }
        double v_new = std::sqrt(z_used);
        if (cfg.mixing > 0.0) v_new = (1.0 - cfg.mixing) * v_new + cfg.mixing * v;
        rec.v_new = v_new;
        state.history.push_back(rec);

        // Convergence compares two sequential update results; V0 is an
        // initialization, not a result, so iteration 1 never terminates.
        if (iter >= 2 && std::abs(v_new - v) <= cfg.tol) {
            v = v_new;
            state.converged = true;
            state.reason = Termination::tolerance;
            break;
        }
        v = v_new;
    }

    // Reported value: average of the final two accepted steps.
    std::vector<double> vs;
    for (const IterationRecord& r : state.history) {
        if (r.omega1_found) vs.push_back(r.v_new);
    }
    if (vs.empty()) {
        state.v_final = v;
    } else if (vs.size() == 1) {
        state.v_final = vs.back();
    } else {
        state.v_final = 0.5 * (vs[vs.size() - 1] + vs[vs.size() - 2]);
    }
    state.z_final = state.v_final * state.v_final;
    return state;
}

std::vector<PhasePoint> phase_diagram(const std::vector<double>& u_list,
                                      const LoopConfig& cfg, int jobs) {
    std::vector<PhasePoint> points(u_list.size());
    auto worker = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < u_list.size(); i += stride) {
            PhasePoint& p = points[i];
            p.u = u_list[i];
            p.z_ref = z_exact(p.u);
            LoopConfig local = cfg;
            local.seed = mix_seed(cfg.seed, 777 + i);
            try {
                DmftState st = dmft_iterate(p.u, 0.5, local);
                p.z_final = st.z_final;
                p.iterations = static_cast<int>(st.history.size());
                p.reason = st.reason;
                p.converged = st.converged;
                p.state = std::move(st);
            } catch (const std::exception& e) {
                p.failed = true;
                p.error = e.what();
            }
        }
    };
    jobs = std::max(1, jobs);
    if (jobs == 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) {
            pool.emplace_back(worker, static_cast<std::size_t>(j),
                              static_cast<std::size_t>(jobs));
        }
        for (std::thread& t : pool) t.join();
    }
    return points;
}

std::string phase_table_csv(const std::vector<PhasePoint>& points) {
    std::ostringstream out;
    out << "U,Z_final,Z_exact,iterations,terminated_reason\n";
    for (const PhasePoint& p : points) {
        out << format_double(p.u) << "," << format_double(p.z_final) << ","
            << format_double(p.z_ref) << "," << p.iterations << ","
            << (p.failed ? ("error:" + p.error) : termination_name(p.reason)) << "\n";
    }
    return out.str();
}

}  // namespace aimdmft::dmft
