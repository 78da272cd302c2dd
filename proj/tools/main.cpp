// Command-line front end for the aimdmft pipeline. Talks to the shared
// library exclusively through the public C API.

#include <CLI11.hpp>
#include <cstdio>
#include <memory>
#include <string>

#include "aimdmft.h"

namespace {

struct ConfigHandle {
    aim_config* ptr;
    ConfigHandle() : ptr(aim_config_create()) {}
    ~ConfigHandle() { aim_config_destroy(ptr); }
    ConfigHandle(const ConfigHandle&) = delete;
    ConfigHandle& operator=(const ConfigHandle&) = delete;
};

int exit_code(aim_status status) {
    switch (status) {
        case AIM_OK: return 0;
        case AIM_ERR_CONVERGENCE: return 2;
        case AIM_ERR_DETECTION: return 3;
        case AIM_ERR_CONFIG: return 4;
        default: return 1;
    }
}

int report(aim_status status) {
    if (status != AIM_OK) {
        std::fprintf(stderr, "error (%s): %s\n", aim_status_name(status),
                     aim_last_error());
    }
    return exit_code(status);
}

bool apply(aim_config* cfg, const std::string& key, const std::string& value,
           aim_status* status) {
    *status = aim_config_set(cfg, key.c_str(), value.c_str());
    if (*status != AIM_OK) {
        std::fprintf(stderr, "error (%s): %s\n", aim_status_name(*status),
                     aim_last_error());
        return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-site DMFT via Cartan fast-forwarded impurity dynamics"};
    app.require_subcommand(1);
    app.fallthrough(true);  // global options may follow the subcommand

    std::string config_path;
    std::string outdir = "out";
    std::vector<std::pair<std::string, std::string>> overrides;

    app.add_option("--config", config_path, "configuration file (key = value lines)");
    app.add_option("--out", outdir, "output directory")->capture_default_str();

    auto add_override = [&overrides](const std::string& key) {
        return [&overrides, key](const std::string& value) {
            overrides.emplace_back(key, value);
        };
    };
    app.add_option_function<std::string>("--seed", add_override("seed"), "random seed");
    app.add_option_function<std::string>("--shots", add_override("shots"),
                                         "shots per circuit evaluation");
    app.add_option_function<std::string>("--noise", add_override("eps_cnot"),
                                         "CNOT depolarizing probability");
    app.add_option_function<std::string>("--jobs", add_override("jobs"),
                                         "parallel sweep workers");
    app.add_flag_callback(
        "--exact", [&overrides] { overrides.emplace_back("exact", "true"); },
        "noiseless infinite-shot expectations");

    auto* cmd_decompose = app.add_subcommand(
        "decompose", "Hamiltonian algebra, Cartan decomposition and KHK solution");
    cmd_decompose->add_option_function<std::string>("--u", add_override("u"),
                                                    "interaction U");
    cmd_decompose->add_option_function<std::string>("--v", add_override("v"),
                                                    "hybridization V");

    auto* cmd_greens = app.add_subcommand(
        "greens", "two-rate Green's function series, spectra and peaks");
    cmd_greens->add_option_function<std::string>("--u", add_override("u"), "interaction U");
    cmd_greens->add_option_function<std::string>("--v", add_override("v"), "hybridization V");

    auto* cmd_dmft = app.add_subcommand("dmft", "one self-consistency loop");
    cmd_dmft->add_option_function<std::string>("--u", add_override("u"), "interaction U");
    cmd_dmft->add_option_function<std::string>("--v0", add_override("v0"),
                                               "initial hybridization");

    auto* cmd_phase = app.add_subcommand("phase-diagram", "sweep over u_list");
    cmd_phase->add_option_function<std::string>("--u-list", add_override("u_list"),
                                                "comma-separated U values");

    auto* cmd_trotter = app.add_subcommand(
        "trotter", "Trotter error fit and total-fidelity landscape");
    cmd_trotter->add_option_function<std::string>("--u", add_override("u"), "interaction U");
    cmd_trotter->add_option_function<std::string>("--v", add_override("v"), "hybridization V");
    cmd_trotter->add_option_function<std::string>("--f-cnot", add_override("f_cnot"),
                                                  "per-CNOT fidelity");
    cmd_trotter->add_option_function<std::string>("--t-target", add_override("t_target"),
                                                  "target simulation time");

    CLI11_PARSE(app, argc, argv);

    ConfigHandle cfg;
    aim_status status = AIM_OK;
    if (!config_path.empty()) {
        status = aim_config_load_file(cfg.ptr, config_path.c_str());
        if (status != AIM_OK) return report(status);
    }
    for (const auto& [key, value] : overrides) {
        if (!apply(cfg.ptr, key, value, &status)) return exit_code(status);
    }

    if (cmd_decompose->parsed()) {
        int dim_g = 0;
        status = aim_run_decompose(cfg.ptr, outdir.c_str(), &dim_g);
        if (status == AIM_OK) {
            std::printf("dim g = %d\n", dim_g);
            std::printf("wrote algebra dumps and cartan_solution.txt to %s\n",
                        outdir.c_str());
        }
    } else if (cmd_greens->parsed()) {
        aim_greens_result res{};
        status = aim_run_greens(cfg.ptr, outdir.c_str(), &res);
        if (status == AIM_OK) {
            std::printf("omega1 = %.6f  omega2 = %.6f\n", res.omega1, res.omega2);
            std::printf("wrote series, spectra and peaks.txt to %s\n", outdir.c_str());
        }
    } else if (cmd_dmft->parsed()) {
        aim_dmft_result res{};
        status = aim_run_dmft(cfg.ptr, outdir.c_str(), &res);
        std::printf("V_final = %.6f  Z_final = %.6f  iterations = %d  (%s)\n",
                    res.v_final, res.z_final, res.iterations, res.reason);
    } else if (cmd_phase->parsed()) {
        int n_failed = 0;
        status = aim_run_phase_diagram(cfg.ptr, outdir.c_str(), &n_failed);
        std::printf("sweep finished, %d non-converged point(s); table in %s\n",
                    n_failed, (outdir + "/phase_diagram.csv").c_str());
    } else if (cmd_trotter->parsed()) {
        double coeff = 0.0;
        status = aim_run_trotter(cfg.ptr, outdir.c_str(), &coeff);
        if (status == AIM_OK) {
            std::printf("fitted error coefficient = %.4f\n", coeff);
            std::printf("wrote landscape files to %s\n", outdir.c_str());
        }
    }
    return report(status);
}
