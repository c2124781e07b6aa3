/* sers.h - C interface to the SERS solver library.
 *
 * Every call returns a sers_status. On failure, sers_last_error() returns a
 * thread-local message describing the most recent error on that thread.
 * Strings returned through char** are owned by the caller and must be
 * released with sers_free_string.
 */
#ifndef SERS_H
#define SERS_H

#include <stddef.h>

#if defined(SERS_BUILDING_LIBRARY)
#define SERS_API __attribute__((visibility("default")))
#else
#define SERS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sers_status {
    SERS_OK = 0,
    SERS_ERR_INVALID_ARGUMENT = 1,
    SERS_ERR_PARAMETER = 2,
    SERS_ERR_CONFIG = 3,
    SERS_ERR_DIMENSION = 4,
    SERS_ERR_SOLVER = 5,
    SERS_ERR_SINGULAR_SHIFT = 6,
    SERS_ERR_INTEGRATOR = 7,
    SERS_ERR_UNDEFINED_CORRELATION = 8,
    SERS_ERR_IO = 9,
    SERS_ERR_RUN_FAILED = 10,
    SERS_ERR_INTERNAL = 99
} sers_status;

typedef enum sers_model_kind {
    SERS_MODEL_OM = 0,
    SERS_MODEL_RES = 1,
    SERS_MODEL_OM_RES = 2,
    SERS_MODEL_BRIGHT = 3
} sers_model_kind;

typedef enum sers_line {
    SERS_LINE_STOKES = 0,
    SERS_LINE_ANTISTOKES = 1
} sers_line;

typedef struct sers_model sers_model;   /* built Hamiltonian plus collapses */
typedef struct sers_state sers_state;   /* steady-state density matrix */

typedef struct sers_g2_result {
    double g2_cross;
    double g2_11;
    double g2_22;
    double R;
    double R_half;
    int converged;
} sers_g2_result;

SERS_API const char* sers_version(void);
SERS_API const char* sers_last_error(void);
SERS_API void sers_free_string(char* s);

/* params_json: a JSON object with ModelParams fields (NULL or "" for
 * defaults). g_om and delta_c_prime may be NaN to derive them from the
 * off-resonant level set. */
SERS_API sers_status sers_model_create(sers_model_kind kind, const char* params_json, double g_om,
                                       double delta_c_prime, sers_model** out);
SERS_API void sers_model_free(sers_model* model);
SERS_API sers_status sers_model_dimension(const sers_model* model, size_t* out);

SERS_API sers_status sers_steady_state(const sers_model* model, sers_state** out);
SERS_API void sers_state_free(sers_state* state);
SERS_API sers_status sers_state_trace(const sers_state* state, double* re, double* im);
/* Mean occupation of a bosonic subsystem: "cavity", "vibron" or "bright". */
SERS_API sers_status sers_state_population(const sers_model* model, const sers_state* state, const char* label,
                                           double* out);

/* Fluctuation spectral density S(omega) at a single lab-frame frequency. */
SERS_API sers_status sers_peak_value(const sers_model* model, const sers_state* state, double omega, double* out);
/* Fills values[0..count) for the lab-frame grid omega[0..count). */
SERS_API sers_status sers_emission_spectrum(const sers_model* model, const sers_state* state, const double* omega,
                                            size_t count, int workers, double* values, double* rayleigh_weight);

SERS_API sers_status sers_thermal_occupancy(double omega_v, double T, double* out);
SERS_API sers_status sers_equalization_temperature(double omega_v, double n_f, double* out);
SERS_API sers_status sers_g_om_from_levels(int count, double g0, double g, double delta, double* out);

/* Filtered correlations at the Stokes/anti-Stokes lines with sensor
 * linewidth Gamma and coupling epsilon_ratio * Gamma. */
SERS_API sers_status sers_filtered_g2(const sers_model* model, double Gamma, double epsilon_ratio,
                                      sers_g2_result* out);

/* Resolves a config document; *out receives the resolved JSON. */
SERS_API sers_status sers_resolve_config(const char* config_json, char** out);
/* Runs the configured task and writes its files. *report receives the run
 * report as JSON (may be NULL). Returns SERS_ERR_RUN_FAILED when any cell or
 * model errored; the report is still produced. */
SERS_API sers_status sers_run(const char* config_json, char** report);

#ifdef __cplusplus
}
#endif

#endif
