#include "aimdmft.h"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "core/cartan.hpp"
#include "core/config.hpp"
#include "core/dmft.hpp"
#include "core/ed.hpp"
#include "core/trotter.hpp"

using namespace aimdmft;

namespace {

thread_local std::string g_last_error;

aim_status fail(aim_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

aim_status map_exception() {
    try {
        throw;
    } catch (const config::ConfigError& e) {
        return fail(AIM_ERR_CONFIG, e.what());
    } catch (const dmft::DetectionFailure& e) {
        return fail(AIM_ERR_DETECTION, e.what());
    } catch (const spectral::RerunSignal& e) {
        return fail(AIM_ERR_DETECTION, e.what());
    } catch (const std::exception& e) {
        return fail(AIM_ERR_INVALID, e.what());
    } catch (...) {
        return fail(AIM_ERR_INVALID, "unknown error");
    }
}

const config::RunConfig& unwrap(const aim_config* cfg) {
    return *reinterpret_cast<const config::RunConfig*>(cfg);
}

void write_file(const std::string& dir, const std::string& name,
                const std::string& header, const std::string& content) {
    std::filesystem::create_directories(dir);
    std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << header << content;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct DetectedPeaks {
    double omega1 = 0.0;
    double omega2 = 0.0;
    double amp1 = 0.0;
    double amp2 = 0.0;
    spectral::GreensSeries high;
    spectral::GreensSeries low;
    spectral::Spectrum spec_high;
    spectral::Spectrum spec_low;
    spectral::RatePlan plan;
};

// Shared measure-and-detect step used by the greens command: windows and
// rates from the analytic poles of the (u, v) model, detected values from
// the measured spectra, reruns with fresh seeds on detection failure.
DetectedPeaks measure_and_detect(const config::RunConfig& cfg, double u, double v) {
    PauliSum ham = jw_aim_hamiltonian(AimParameters::half_filled_two_site(u, v));
    lie::Decomposition dec = lie::analyze(ham);
    std::vector<cartan::CartanSolution> sols;
    for (int s = 0; s < cfg.solutions; ++s) {
        sols.push_back(cartan::solve_with_retries(ham, dec, cfg.seed + 101 * s + 1));
    }
    double theta = circuit::optimize_ansatz_angle(u, v);

    ed::TwoPole poles = ed::two_pole(ed::lehmann(u, v));
    spectral::PeakPair expected{poles.omega1, poles.omega2, poles.alpha1 > 1e-9,
                                poles.alpha1, poles.alpha2};
    spectral::Config scfg = cfg.spectral_config();
    spectral::MeasureConfig mc = cfg.measure_config();

    std::string last = "no attempts made";
    for (int attempt = 0; attempt < scfg.rerun_attempts; ++attempt) {
        DetectedPeaks out;
        out.plan = spectral::plan_rates(expected, scfg);
        mc.seed = cfg.seed + 7919 * (attempt + 1);
        out.high = spectral::measure_series(sols, theta, out.plan.dt_high, "high", mc, scfg);
        mc.seed += 1;
        out.low = spectral::measure_series(sols, theta, out.plan.dt_low, "low", mc, scfg);
        out.spec_high = spectral::dft_spectrum(out.high, scfg);
        out.spec_low = spectral::dft_spectrum(out.low, scfg);
        try {
            out.omega2 = spectral::detect_omega2(out.spec_high, expected.omega2,
                                                 expected.omega1, scfg, &out.amp2);
            out.omega1 = spectral::detect_omega1(out.spec_low, expected.omega1,
                                                 out.omega2, out.plan.omega_s_low,
                                                 scfg, &out.amp1);
            return out;
        } catch (const spectral::RerunSignal& e) {
            last = e.what();
        }
    }
    throw dmft::DetectionFailure("peak detection failed after " +
                                 std::to_string(scfg.rerun_attempts) +
                                 " attempts; last: " + last);
}

const char* kPhasePlotScript =
    "import csv\n"
    "import matplotlib.pyplot as plt\n"
    "\n"
    "us, zf, zx = [], [], []\n"
    "with open('phase_diagram.csv') as fh:\n"
    "    for row in csv.DictReader(r for r in fh if not r.startswith('#')):\n"
    "        us.append(float(row['U']))\n"
    "        zf.append(float(row['Z_final']))\n"
    "        zx.append(float(row['Z_exact']))\n"
    "plt.plot(us, zx, 'k-', label='exact')\n"
    "plt.plot(us, zf, 'o', label='pipeline')\n"
    "plt.xlabel('U')\n"
    "plt.ylabel('Z')\n"
    "plt.legend()\n"
    "plt.savefig('phase_diagram.png', dpi=160)\n";

}  // namespace

extern "C" {

const char* aim_version(void) { return "0.1.0"; }

const char* aim_status_name(aim_status status) {
    switch (status) {
        case AIM_OK: return "ok";
        case AIM_ERR_INVALID: return "invalid";
        case AIM_ERR_CONVERGENCE: return "convergence-failure";
        case AIM_ERR_DETECTION: return "detection-failure";
        case AIM_ERR_CONFIG: return "config-error";
    }
    return "unknown";
}

const char* aim_last_error(void) { return g_last_error.c_str(); }

aim_config* aim_config_create(void) {
    return reinterpret_cast<aim_config*>(new config::RunConfig());
}

void aim_config_destroy(aim_config* cfg) {
    delete reinterpret_cast<config::RunConfig*>(cfg);
}

aim_status aim_config_set(aim_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return fail(AIM_ERR_INVALID, "null argument");
    try {
        reinterpret_cast<config::RunConfig*>(cfg)->set(key, value);
        reinterpret_cast<config::RunConfig*>(cfg)->validate();
        return AIM_OK;
    } catch (...) {
        return map_exception();
    }
}

aim_status aim_config_get(const aim_config* cfg, const char* key, char* buf,
                          size_t buflen) {
    if (!cfg || !key || !buf || buflen == 0) return fail(AIM_ERR_INVALID, "null argument");
    try {
        std::string value = unwrap(cfg).get(key);
        std::snprintf(buf, buflen, "%s", value.c_str());
        return AIM_OK;
    } catch (...) {
        return map_exception();
    }
}

aim_status aim_config_load_file(aim_config* cfg, const char* path) {
    if (!cfg || !path) return fail(AIM_ERR_INVALID, "null argument");
    try {
        *reinterpret_cast<config::RunConfig*>(cfg) = config::RunConfig::from_file(path);
        return AIM_OK;
    } catch (...) {
        return map_exception();
    }
}

uint64_t aim_config_hash(const aim_config* cfg) {
    return cfg ? unwrap(cfg).hash() : 0;
}

aim_status aim_run_decompose(const aim_config* cfg, const char* outdir, int* dim_g) {
    if (!cfg || !outdir) return fail(AIM_ERR_INVALID, "null argument");
    try {
        const config::RunConfig& rc = unwrap(cfg);
        rc.validate();
        PauliSum ham =
            jw_aim_hamiltonian(AimParameters::half_filled_two_site(rc.u, rc.v));
        lie::Decomposition dec = lie::analyze(ham);
        cartan::CartanSolution sol = cartan::solve_with_retries(ham, dec, rc.seed);

        std::string header = rc.file_header();
        write_file(outdir, "algebra_g.txt", header, lie::dump(dec.g));
        write_file(outdir, "algebra_k.txt", header, lie::dump(dec.k));
        write_file(outdir, "algebra_m.txt", header, lie::dump(dec.m));
        write_file(outdir, "algebra_h.txt", header, lie::dump(dec.h));
        write_file(outdir, "algebra_k0.txt", header, lie::dump(dec.k0));
        write_file(outdir, "algebra_k1.txt", header, lie::dump(dec.k1));
        write_file(outdir, "cartan_solution.txt", header, sol.serialize());

        std::string summary;
        summary += "hamiltonian " + ham.to_string() + "\n";
        summary += "dim_g " + std::to_string(dec.g.size()) + "\n";
        summary += "dim_k " + std::to_string(dec.k.size()) + "\n";
        summary += "dim_m " + std::to_string(dec.m.size()) + "\n";
        summary += "dim_h " + std::to_string(dec.h.size()) + "\n";
        summary += "dim_k0 " + std::to_string(dec.k0.size()) + "\n";
        summary += "dim_k1 " + std::to_string(dec.k1.size()) + "\n";
        summary += std::string("k_abelian ") + (dec.k_abelian ? "1" : "0") + "\n";
        summary += "residual " + format_double(sol.residual) + "\n";
        for (double t : {0.1, 1.0, 10.0, 100.0}) {
            summary += "khk_error_t" + format_double(t) + " " +
                       format_double(cartan::reconstruction_error(sol, ham, t)) + "\n";
        }
        write_file(outdir, "decompose_summary.txt", header, summary);
        if (dim_g) *dim_g = static_cast<int>(dec.g.size());
        return AIM_OK;
    } catch (...) {
        return map_exception();
    }
}

aim_status aim_run_greens(const aim_config* cfg, const char* outdir,
                          aim_greens_result* result) {
    if (!cfg || !outdir) return fail(AIM_ERR_INVALID, "null argument");
    try {
        const config::RunConfig& rc = unwrap(cfg);
        rc.validate();
        DetectedPeaks peaks = measure_and_detect(rc, rc.u, rc.v);

        std::string header = rc.file_header();
        write_file(outdir, "greens_high.csv", header, peaks.high.to_csv());
        write_file(outdir, "greens_low.csv", header, peaks.low.to_csv());
        write_file(outdir, "spectrum_high.csv", header, peaks.spec_high.to_csv());
        write_file(outdir, "spectrum_low.csv", header, peaks.spec_low.to_csv());

        std::string txt;
        txt += "omega1 " + format_double(peaks.omega1) + "\n";
        txt += "omega2 " + format_double(peaks.omega2) + "\n";
        txt += "amp1_rel " + format_double(peaks.amp1) + "\n";
        txt += "amp2_rel " + format_double(peaks.amp2) + "\n";
        txt += "dt_high " + format_double(peaks.plan.dt_high) + "\n";
        txt += "dt_low " + format_double(peaks.plan.dt_low) + "\n";
        write_file(outdir, "peaks.txt", header, txt);

        if (result) {
            result->omega1 = peaks.omega1;
            result->omega2 = peaks.omega2;
            result->amp1_rel = peaks.amp1;
            result->amp2_rel = peaks.amp2;
        }
        return AIM_OK;
    } catch (...) {
        return map_exception();
    }
}

aim_status aim_run_dmft(const aim_config* cfg, const char* outdir,
                        aim_dmft_result* result) {
    if (!cfg || !outdir) return fail(AIM_ERR_INVALID, "null argument");
    try {
        const config::RunConfig& rc = unwrap(cfg);
        rc.validate();
        dmft::DmftState st = dmft::dmft_iterate(rc.u, rc.v0, rc.loop_config());

        std::string header = rc.file_header();
        write_file(outdir, "dmft_history.csv", header, st.history_csv());

        std::string summary;
        summary += "U " + format_double(st.u) + "\n";
        summary += "V0 " + format_double(st.v0) + "\n";
        summary += "V_final " + format_double(st.v_final) + "\n";
        summary += "Z_final " + format_double(st.z_final) + "\n";
        summary += "iterations " + std::to_string(st.history.size()) + "\n";
        summary += std::string("terminated_reason ") + dmft::termination_name(st.reason) + "\n";
        write_file(outdir, "dmft_summary.txt", header, summary);

        // Local density of states from the last iteration with a resolved
        // quasiparticle peak.
        for (auto it = st.history.rbegin(); it != st.history.rend(); ++it) {
            if (!it->omega1_found || it->omega1 == it->omega2) continue;
            dmft::SelfEnergyModel model;
            model.omega1 = it->omega1;
            model.omega2 = it->omega2;
            model.v = it->v_in;
            dmft::Amplitudes amps = dmft::amplitudes(it->omega1, it->omega2, it->v_in);
            model.alpha1 = amps.alpha1;
            model.alpha2 = amps.alpha2;
            write_file(outdir, "spectral_function.csv", header,
                       dmft::spectral_function(model, rc.eta).to_csv());
            break;
        }

        if (result) {
            result->v_final = st.v_final;
            result->z_final = st.z_final;
            result->iterations = static_cast<int>(st.history.size());
            result->converged = st.converged ? 1 : 0;
            std::snprintf(result->reason, sizeof(result->reason), "%s",
                          dmft::termination_name(st.reason));
        }
        if (!st.converged && st.reason == dmft::Termination::max_iter) {
            return fail(AIM_ERR_CONVERGENCE,
                        "loop hit max_iter without meeting the tolerance");
        }
        return AIM_OK;
    } catch (...) {
        return map_exception();
    }
}

aim_status aim_run_phase_diagram(const aim_config* cfg, const char* outdir,
                                 int* n_failed) {
    if (!cfg || !outdir) return fail(AIM_ERR_INVALID, "null argument");
    try {
        const config::RunConfig& rc = unwrap(cfg);
        rc.validate();
        std::vector<dmft::PhasePoint> points =
            dmft::phase_diagram(rc.u_list, rc.loop_config(), rc.jobs);

        std::string header = rc.file_header();
        write_file(outdir, "phase_diagram.csv", header, dmft::phase_table_csv(points));
        int bad = 0;
        for (const dmft::PhasePoint& p : points) {
            if (p.failed || (!p.converged && p.reason == dmft::Termination::max_iter)) {
                ++bad;
            }
            if (!p.failed) {
                char name[64];
                std::snprintf(name, sizeof(name), "history_U%g.csv", p.u);
                write_file(outdir, name, header, p.state.history_csv());
            }
        }
        write_file(outdir, "plot_phase.py", header, kPhasePlotScript);
        if (n_failed) *n_failed = bad;
        if (bad > 0) {
            return fail(AIM_ERR_CONVERGENCE,
                        std::to_string(bad) + " sweep points failed to converge");
        }
        return AIM_OK;
    } catch (...) {
        return map_exception();
    }
}

aim_status aim_run_trotter(const aim_config* cfg, const char* outdir,
                           double* fit_coeff) {
    if (!cfg || !outdir) return fail(AIM_ERR_INVALID, "null argument");
    try {
        const config::RunConfig& rc = unwrap(cfg);
        rc.validate();
        trotter::FitReport fit = trotter::fit_error_coefficient(rc.u, rc.v);
        std::vector<double> t_grid, r_grid;
        for (double t = 0.5; t <= rc.t_target + 1e-9; t += 0.5) t_grid.push_back(t);
        for (double r : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0}) r_grid.push_back(r);
        trotter::Landscape land =
            trotter::fidelity_landscape(rc.u, rc.v, t_grid, r_grid, rc.f_cnot);

        std::string header = rc.file_header();
        std::string txt;
        txt += "fit_coeff " + format_double(fit.chosen) + "\n";
        txt += "fit_coeff_frobenius " + format_double(fit.coeff_frobenius) + "\n";
        txt += "fit_coeff_normalized " + format_double(fit.coeff_normalized) + "\n";
        txt += "points_used " + std::to_string(fit.points_used) + "\n";
        txt += "f_cnot " + format_double(rc.f_cnot) + "\n";
        txt += "cartan_reference_high " + format_double(land.cartan_high) + "\n";
        txt += "cartan_reference_low " + format_double(land.cartan_low) + "\n";
        txt += "cnot_cost_model 6r+2 all-to-all, 6r+11 linear\n";
        write_file(outdir, "trotter_fit.txt", header, txt);
        write_file(outdir, "trotter_landscape.csv", header, land.grid_csv());
        write_file(outdir, "trotter_maxcurve.csv", header, land.curve_csv());
        if (fit_coeff) *fit_coeff = fit.chosen;
        return AIM_OK;
    } catch (...) {
        return map_exception();
    }
}

aim_status aim_alias_frequency(double omega, double omega_s, double* out) {
    if (!out) return fail(AIM_ERR_INVALID, "null output");
    try {
        *out = spectral::alias_frequency(omega, omega_s);
        return AIM_OK;
    } catch (...) {
        return map_exception();
    }
}

aim_status aim_quasiparticle_weight(double omega1, double omega2, double v,
                                    double* out) {
    if (!out) return fail(AIM_ERR_INVALID, "null output");
    try {
        *out = dmft::quasiparticle_weight(omega1, omega2, v);
        return AIM_OK;
    } catch (...) {
        return map_exception();
    }
}

aim_status aim_exact_poles(double u, double v, aim_greens_result* out) {
    if (!out) return fail(AIM_ERR_INVALID, "null output");
    try {
        ed::TwoPole p = ed::two_pole(ed::lehmann(u, v));
        out->omega1 = p.omega1;
        out->omega2 = p.omega2;
        out->amp1_rel = p.alpha1;
        out->amp2_rel = p.alpha2;
        return AIM_OK;
    } catch (...) {
        return map_exception();
    }
}

aim_status aim_greens_exact(double u, double v, const double* times, size_t n,
                            double* out) {
    if (!times || !out) return fail(AIM_ERR_INVALID, "null argument");
    try {
        ed::Spectrum s = ed::lehmann(u, v);
        for (size_t i = 0; i < n; ++i) out[i] = s.greens(times[i]);
        return AIM_OK;
    } catch (...) {
        return map_exception();
    }
}

double aim_z_exact(double u) { return dmft::z_exact(u); }

}  // extern "C"
