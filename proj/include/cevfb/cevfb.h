/*
 * cevfb: American put under the CEV model, front-fixing compact scheme.
 *
 * All functions return a cevfb_status. On failure a message is available
 * from cevfb_last_error() on the calling thread until the next call.
 * Handles are not thread-safe; distinct handles may be used concurrently.
 */
#ifndef CEVFB_CEVFB_H
#define CEVFB_CEVFB_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(CEVFB_BUILDING)
#    define CEVFB_API __declspec(dllexport)
#  else
#    define CEVFB_API __declspec(dllimport)
#  endif
#else
#  define CEVFB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cevfb_status {
    CEVFB_OK = 0,
    CEVFB_ERR_NULL_ARGUMENT = 1,
    CEVFB_ERR_INVALID_PARAMETER = 2,
    CEVFB_ERR_DOMAIN = 3,
    CEVFB_ERR_GRID_SPEC = 4,
    CEVFB_ERR_MODE_MISMATCH = 5,
    CEVFB_ERR_SINGULAR = 6,
    CEVFB_ERR_BOUNDARY_ESCAPE = 7,
    CEVFB_ERR_STAGNATION = 8,
    CEVFB_ERR_NON_CONVERGENCE = 9,
    CEVFB_ERR_OUT_OF_RANGE = 10,
    CEVFB_ERR_INTERNAL = 11
} cevfb_status;

typedef enum cevfb_scheme {
    CEVFB_SCHEME_DCU = 0,  /* uniform grid */
    CEVFB_SCHEME_DCSL = 1  /* refined near the boundary, staggered estimator */
} cevfb_scheme;

/* Market units. sigma is the volatility at S = S0. */
typedef struct cevfb_model {
    double strike;
    double maturity;
    double sigma;
    double rate;
    double alpha;
    double spot;
    double x_max;
} cevfb_model;

typedef struct cevfb_scheme_config {
    cevfb_scheme scheme;
    double h;
    double refine_ratio;
    int fine_intervals;
    /* All zero selects the scheme default. */
    double gamma[4];
} cevfb_scheme_config;

typedef struct cevfb_controller {
    double tolerance;
    double safety;
    double min_factor;
    double max_factor;
    double min_step;
    double max_step; /* 0: T/10 */
    double initial_step;
    int max_min_step_hits;
} cevfb_controller;

typedef struct cevfb_result {
    double value;
    double delta;
    double boundary; /* s_f(T) S0 */
    long accepted;
    long rejected;
    long clamp_events;
    long evaluations;
    double wall_seconds;
} cevfb_result;

typedef struct cevfb_step {
    double tau;
    double k;
    double e_u;
    double e_w;
    int accepted;
} cevfb_step;

typedef struct cevfb_lcp_grid {
    double s_max; /* 0: 4 max(K, S0) */
    int spot_intervals;
    int time_steps;
    int implicit_steps;
    double omega;
    double tolerance;
    int max_iterations;
    int warm_start;
} cevfb_lcp_grid;

typedef struct cevfb_lcp_result {
    double value;
    double delta;
    long sor_sweeps;
    int max_sweeps_per_level;
} cevfb_lcp_result;

enum {
    CEVFB_RECORD_HISTORY = 1,
    CEVFB_RECORD_STEPS = 2
};

typedef struct cevfb_run cevfb_run;

CEVFB_API const char* cevfb_version(void);
CEVFB_API const char* cevfb_status_string(cevfb_status status);
CEVFB_API const char* cevfb_last_error(void);

CEVFB_API void cevfb_model_defaults(cevfb_model* model);
CEVFB_API void cevfb_scheme_defaults(cevfb_scheme_config* scheme, cevfb_scheme kind);
CEVFB_API void cevfb_controller_defaults(cevfb_controller* controller);
CEVFB_API void cevfb_lcp_defaults(cevfb_lcp_grid* grid);

/* Adaptive run; controller may be NULL for defaults. */
CEVFB_API cevfb_status cevfb_price(const cevfb_model* model,
                                   const cevfb_scheme_config* scheme,
                                   const cevfb_controller* controller,
                                   cevfb_result* out);

/* Runs immediately and keeps the outputs selected by flags. */
CEVFB_API cevfb_status cevfb_run_create(const cevfb_model* model,
                                        const cevfb_scheme_config* scheme,
                                        const cevfb_controller* controller,
                                        int flags, cevfb_run** out);

/* Fixed step k with the fifth-order weights, no error control. */
CEVFB_API cevfb_status cevfb_run_create_fixed(const cevfb_model* model,
                                              const cevfb_scheme_config* scheme,
                                              double k, int flags, cevfb_run** out);

CEVFB_API void cevfb_run_destroy(cevfb_run* run);

CEVFB_API cevfb_status cevfb_run_result(const cevfb_run* run, cevfb_result* out);

/* Boundary history: (tau, s_f S0) at tau = 0 and after each accepted step. */
CEVFB_API size_t cevfb_run_history_size(const cevfb_run* run);
CEVFB_API cevfb_status cevfb_run_history(const cevfb_run* run, size_t index,
                                         double* tau, double* boundary);

CEVFB_API size_t cevfb_run_step_count(const cevfb_run* run);
CEVFB_API cevfb_status cevfb_run_step(const cevfb_run* run, size_t index, cevfb_step* out);

/* Grid nodes x_0..x_M; u has M entries, w has M - 1 (w_1..w_{M-1}). */
CEVFB_API size_t cevfb_run_node_count(const cevfb_run* run);
CEVFB_API cevfb_status cevfb_run_state(const cevfb_run* run, double* x, double* u, double* w);

/* Crank-Nicolson projected SOR reference; grid may be NULL for defaults. */
CEVFB_API cevfb_status cevfb_oracle_price(const cevfb_model* model,
                                          const cevfb_lcp_grid* grid,
                                          cevfb_lcp_result* out);

#ifdef __cplusplus
}
#endif

#endif /* CEVFB_CEVFB_H */
