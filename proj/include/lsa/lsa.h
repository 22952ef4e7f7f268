#ifndef LSA_LSA_H
#define LSA_LSA_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(LSA_BUILDING_LIBRARY)
#define LSA_API __attribute__((visibility("default")))
#else
#define LSA_API
#endif

/* Every fallible call returns a status; on failure lsa_last_error() holds a
 * message for the calling thread until its next failing call. */
typedef enum lsa_status {
    LSA_OK = 0,
    LSA_ERR_INVALID_ARGUMENT = 1,
    LSA_ERR_CONFIG = 2,
    LSA_ERR_NUMERICAL = 3,
    LSA_ERR_IO = 4,
    LSA_ERR_INTERNAL = 5
} lsa_status;

LSA_API const char* lsa_version(void);
LSA_API const char* lsa_last_error(void);
LSA_API const char* lsa_status_name(lsa_status status);
/* Process exit code for a status: 0 ok, 2 config/argument, 3 numerical, 1 other. */
LSA_API int lsa_exit_code(lsa_status status);

/* ---- laser parameters ---------------------------------------------------- */

typedef struct lsa_params lsa_params;

/* Default single-mode laser parameters. */
LSA_API lsa_status lsa_params_create(lsa_params** out);
/* Overrides by config key, e.g. "tau_n_ns", "kappa_per_s". */
LSA_API lsa_status lsa_params_set(lsa_params* p, const char* key, double value);
LSA_API lsa_status lsa_params_get(const lsa_params* p, const char* key, double* value);
LSA_API void lsa_params_destroy(lsa_params* p);

LSA_API lsa_status lsa_threshold_current(const lsa_params* p, double* amps);
LSA_API lsa_status lsa_power_to_photon_density(const lsa_params* p, double watts, double* per_cm3);
LSA_API lsa_status lsa_photon_density_to_power(const lsa_params* p, double per_cm3, double* watts);

/* ---- drive, injection, integration settings ------------------------------ */

typedef enum lsa_filter { LSA_FILTER_BESSEL = 0, LSA_FILTER_BUTTERWORTH = 1, LSA_FILTER_NONE = 2 } lsa_filter;

typedef struct lsa_drive {
    double on_current;  /* A */
    double off_current; /* A */
    double period;      /* s */
    double on_fraction;
    lsa_filter filter;
    int filter_order;
    double filter_cutoff; /* Hz, -3 dB */
    int64_t n_pulses;
} lsa_drive;

typedef enum lsa_phase_mode { LSA_PHASE_CONSTANT = 0, LSA_PHASE_PER_PULSE_UNIFORM = 1 } lsa_phase_mode;

typedef struct lsa_injection {
    double power; /* W at the slave facet */
    lsa_phase_mode phase_mode;
    double phase; /* rad, constant mode */
    uint64_t phase_seed;
    double detuning; /* rad/s */
} lsa_injection;

typedef struct lsa_integration {
    double dt; /* s */
    uint64_t seed;
    int noise; /* nonzero enables Langevin forces */
    int64_t record_stride;
} lsa_integration;

typedef struct lsa_integration_stats {
    int64_t steps;
    int64_t photon_clamps;
    int64_t carrier_clamps;
    int64_t floor_events;
} lsa_integration_stats;

LSA_API void lsa_drive_default(lsa_drive* d);
LSA_API void lsa_injection_default(lsa_injection* inj);
LSA_API void lsa_integration_default(lsa_integration* opt);
/* Checks the gain-switching constraints; message lists violations. */
LSA_API lsa_status lsa_check_drive(const lsa_params* p, const lsa_drive* d);

/* ---- traces -------------------------------------------------------------- */

typedef struct lsa_trace lsa_trace;

typedef enum lsa_column {
    LSA_COL_TIME = 0,
    LSA_COL_CURRENT = 1,
    LSA_COL_CARRIER_DENSITY = 2,
    LSA_COL_PHOTON_DENSITY = 3,
    LSA_COL_PHASE = 4,
    LSA_COL_POWER = 5
} lsa_column;

/* Injection may be NULL for a free-running laser. */
LSA_API lsa_status lsa_integrate(const lsa_params* p, const lsa_drive* d, const lsa_injection* inj,
                                 const lsa_integration* opt, lsa_trace** out);
/* Separately coded integrator without any injection path. */
LSA_API lsa_status lsa_integrate_free_running(const lsa_params* p, const lsa_drive* d, const lsa_integration* opt,
                                              lsa_trace** out);
LSA_API size_t lsa_trace_length(const lsa_trace* t);
LSA_API const double* lsa_trace_column(const lsa_trace* t, lsa_column column);
LSA_API lsa_status lsa_trace_stats(const lsa_trace* t, lsa_integration_stats* out);
/* CSV when the path ends in ".csv", binary otherwise. */
LSA_API lsa_status lsa_trace_save(const lsa_trace* t, const char* path, const char* digest);
LSA_API lsa_status lsa_trace_load(const char* path, lsa_trace** out);
/* Energy of each post-burn-in drive period (J). With out == NULL only the
 * count is reported. */
LSA_API lsa_status lsa_trace_pulse_energies(const lsa_trace* t, const lsa_drive* d, int64_t burn_in, double* out,
                                            size_t capacity, size_t* count);
LSA_API void lsa_trace_destroy(lsa_trace* t);

/* ---- analysis utilities -------------------------------------------------- */

LSA_API lsa_status lsa_isolation_budget(double eve_max_watts, double threshold_watts, double* decibels);
/* Strict SI quantity such as "55kW" or "100fs"; unit may be "". */
LSA_API lsa_status lsa_parse_quantity(const char* text, const char* unit, double* value);
LSA_API lsa_status lsa_pearson(const double* x, const double* y, size_t n, double* rho);
/* Pairs x[i] with y[i + lag] for |lag| <= max_lag; reports the lag of the
 * largest |rho| (ties go to the smaller |lag|). */
LSA_API lsa_status lsa_cross_correlation(const double* x, const double* y, size_t n, int64_t max_lag,
                                         int64_t* best_lag, double* best_rho);

/* ---- runs ---------------------------------------------------------------- */

typedef struct lsa_run lsa_run;
typedef void (*lsa_progress_fn)(const char* line, void* user);

LSA_API lsa_status lsa_run_create(lsa_run** out);
/* Options: "profile" (ci|paper, apply before loading), "scenario", "seed",
 * "out", "jobs", "resume" (0|1), "eve_max" (e.g. "55kW"), "threshold"
 * (e.g. "1nW"), "source". */
LSA_API lsa_status lsa_run_set_option(lsa_run* run, const char* key, const char* value);
/* Config or manifest file. Without a call the profile defaults apply. */
LSA_API lsa_status lsa_run_load_config(lsa_run* run, const char* path);
LSA_API lsa_status lsa_run_load_config_string(lsa_run* run, const char* text, const char* origin);
LSA_API lsa_status lsa_run_set_progress(lsa_run* run, lsa_progress_fn fn, void* user);
/* Canonical JSON of the effective config and its digest. */
LSA_API const char* lsa_run_config_json(lsa_run* run);
LSA_API const char* lsa_run_digest(lsa_run* run);
LSA_API lsa_status lsa_run_execute(lsa_run* run);
LSA_API const char* lsa_run_directory(const lsa_run* run);
LSA_API const char* lsa_run_summary_json(const lsa_run* run);
LSA_API const char* lsa_run_summary_text(const lsa_run* run);
LSA_API void lsa_run_destroy(lsa_run* run);

#ifdef __cplusplus
}
#endif

#endif
