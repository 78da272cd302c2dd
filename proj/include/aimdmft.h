/* Public C API of the aimdmft shared library.
 *
 * A classical pipeline for the two-site dynamical mean-field problem:
 * Lie-algebraic (KHK) fast-forwarded time evolution of the two-site Anderson
 * impurity model, simulated noisy measurement of the impurity Green's
 * function, spectral frequency extraction, the V -> sqrt(Z) self-consistency
 * loop, and a second-order Trotter fidelity comparison.
 *
 * All entry points are thread-compatible: distinct handles may be used from
 * distinct threads. Errors are reported as status codes; aim_last_error()
 * returns a thread-local description of the most recent failure.
 */

#ifndef AIMDMFT_H
#define AIMDMFT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aim_status {
    AIM_OK = 0,
    AIM_ERR_INVALID = 1,      /* bad arguments, I/O failures, internal errors */
    AIM_ERR_CONVERGENCE = 2,  /* a DMFT loop hit its iteration cap */
    AIM_ERR_DETECTION = 3,    /* peak detection failed after all reruns */
    AIM_ERR_CONFIG = 4        /* unknown key or invalid configuration value */
} aim_status;

const char* aim_version(void);
const char* aim_status_name(aim_status status);
/* Thread-local message describing the most recent error in this thread. */
const char* aim_last_error(void);

/* ------------------------------------------------------------------ */
/* Configuration                                                       */

typedef struct aim_config aim_config;

aim_config* aim_config_create(void);
void aim_config_destroy(aim_config* cfg);
aim_status aim_config_set(aim_config* cfg, const char* key, const char* value);
/* Copies the value of `key` into buf (NUL terminated, truncated to buflen). */
aim_status aim_config_get(const aim_config* cfg, const char* key, char* buf,
                          size_t buflen);
/* key = value lines; '#' comments; unknown keys rejected. */
aim_status aim_config_load_file(aim_config* cfg, const char* path);
uint64_t aim_config_hash(const aim_config* cfg);

/* ------------------------------------------------------------------ */
/* Pipeline commands. Each writes its data files under `outdir`         */
/* (created when missing) and fills the optional out-parameters.        */

/* Hamiltonian algebra + Cartan solution for (u, v).
 * Files: algebra_*.txt, cartan_solution.txt, decompose_summary.txt. */
aim_status aim_run_decompose(const aim_config* cfg, const char* outdir,
                             int* dim_g /* nullable */);

typedef struct aim_greens_result {
    double omega1;
    double omega2;
    double amp1_rel;
    double amp2_rel;
} aim_greens_result;

/* Two-rate Green's function series, spectra and detected peaks for (u, v).
 * Files: greens_high.csv, greens_low.csv, spectrum_high.csv,
 * spectrum_low.csv, peaks.txt. */
aim_status aim_run_greens(const aim_config* cfg, const char* outdir,
                          aim_greens_result* result /* nullable */);

typedef struct aim_dmft_result {
    double v_final;
    double z_final;
    int iterations;
    int converged;
    char reason[24]; /* "tolerance" | "max_iter" | "omega1_not_found" */
} aim_dmft_result;

/* One self-consistency loop at (u, v0).
 * Files: dmft_history.csv, dmft_summary.txt, spectral_function.csv. */
aim_status aim_run_dmft(const aim_config* cfg, const char* outdir,
                        aim_dmft_result* result /* nullable */);

/* Sweep over u_list; per-U failures recorded, sweep continues.
 * Files: phase_diagram.csv, history_U*.csv, plot_phase.py. */
aim_status aim_run_phase_diagram(const aim_config* cfg, const char* outdir,
                                 int* n_failed /* nullable */);

/* Trotter error fit and total-fidelity landscape.
 * Files: trotter_fit.txt, trotter_landscape.csv, trotter_maxcurve.csv. */
aim_status aim_run_trotter(const aim_config* cfg, const char* outdir,
                           double* fit_coeff /* nullable */);

/* ------------------------------------------------------------------ */
/* Direct numeric entry points                                          */

/* |omega - omega_s * NINT(omega / omega_s)| with round-half-up NINT. */
aim_status aim_alias_frequency(double omega, double omega_s, double* out);

/* Z = w1^2 w2^2 / (V^2 (w1^2 + w2^2 - V^2)). */
aim_status aim_quasiparticle_weight(double omega1, double omega2, double v,
                                    double* out);

/* Exact Lehmann poles of the half-filled two-site model. */
aim_status aim_exact_poles(double u, double v, aim_greens_result* out);

/* Exact iG(t) = 2[a1 cos(w1 t) + a2 cos(w2 t)] at the given times. */
aim_status aim_greens_exact(double u, double v, const double* times, size_t n,
                            double* out);

/* Exact two-site quasiparticle weight 1 - (U/6)^2 (0 above U_c = 6). */
double aim_z_exact(double u);

#ifdef __cplusplus
}
#endif

#endif /* AIMDMFT_H */
