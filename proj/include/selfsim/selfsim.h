/* C interface to the selfsim library: profile shooting, Pohozaev diagnostics
 * and the radial extinction solver. Every call returns a selfsim_status; on
 * failure selfsim_last_error() holds a message for the calling thread. */
#ifndef SELFSIM_SELFSIM_H
#define SELFSIM_SELFSIM_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(SELFSIM_BUILD_SHARED)
#    define SELFSIM_API __declspec(dllexport)
#  else
#    define SELFSIM_API __declspec(dllimport)
#  endif
#else
#  define SELFSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum selfsim_status {
  SELFSIM_OK = 0,
  SELFSIM_E_OUT_OF_RANGE = 1,
  SELFSIM_E_DOMAIN = 2,
  SELFSIM_E_STEP_SIZE_UNDERFLOW = 3,
  SELFSIM_E_NO_ZERO_WITHIN_HORIZON = 4,
  SELFSIM_E_ROOT_BRACKET_FAILURE = 5,
  SELFSIM_E_GRID_MISMATCH = 6,
  SELFSIM_E_BRACKET_FAILURE = 7,
  SELFSIM_E_BISECTION_STALL = 8,
  SELFSIM_E_NO_PLATEAU = 9,
  SELFSIM_E_WINDOW_TOO_SHORT = 10,
  SELFSIM_E_NON_MONOTONE_INITIAL_DATA = 11,
  SELFSIM_E_TIMESTEP_UNDERFLOW = 12,
  SELFSIM_E_MAX_STEPS_EXCEEDED = 13,
  SELFSIM_E_INSUFFICIENT_DECAY = 14,
  SELFSIM_E_BAD_EXTINCTION_TIME = 15,
  SELFSIM_E_IO = 16,
  SELFSIM_E_INVALID_ARGUMENT = 17,
  SELFSIM_E_INTERNAL = 18
} selfsim_status;

SELFSIM_API const char* selfsim_version(void);
SELFSIM_API const char* selfsim_status_name(selfsim_status status);
/* Message of the last failed call on this thread; "" if none. */
SELFSIM_API const char* selfsim_last_error(void);

/* ---- parameters ---------------------------------------------------------- */

typedef struct selfsim_params selfsim_params;

typedef struct selfsim_params_info {
  int N;
  double p;
  double p_c;
  double e_flux;
  double e_g;
  double e_slow;
  double e_time;
  double e_weight;
  double e_energy;
  double r_G; /* 0 when N = 1 */
} selfsim_params_info;

SELFSIM_API selfsim_status selfsim_params_create(int N, double p, selfsim_params** out);
SELFSIM_API void selfsim_params_destroy(selfsim_params* params);
SELFSIM_API selfsim_status selfsim_params_info_get(const selfsim_params* params,
                                                   selfsim_params_info* out);
SELFSIM_API selfsim_status selfsim_weight_rho(const selfsim_params* params, double r, double* out);

/* ---- tables -------------------------------------------------------------- */

typedef struct selfsim_table selfsim_table;

SELFSIM_API void selfsim_table_destroy(selfsim_table* table);
SELFSIM_API size_t selfsim_table_rows(const selfsim_table* table);
SELFSIM_API size_t selfsim_table_cols(const selfsim_table* table);
/* NULL for an out-of-range column. */
SELFSIM_API const char* selfsim_table_column(const selfsim_table* table, size_t col);
/* NaN for out-of-range indices. */
SELFSIM_API double selfsim_table_value(const selfsim_table* table, size_t row, size_t col);
SELFSIM_API selfsim_status selfsim_table_write_csv(const selfsim_table* table, const char* path);

/* Writes a JSON summary document with stable formatting. */
SELFSIM_API selfsim_status selfsim_summary_write(const char* path, const char* json);

/* ---- profile ODE --------------------------------------------------------- */

typedef struct selfsim_ode_options {
  double rel_tol;
  double abs_tol;
  double r_max;
  double eps_start; /* 0 selects the default start radius */
  double j_neg_threshold;
} selfsim_ode_options;

SELFSIM_API void selfsim_ode_options_default(selfsim_ode_options* out);

/* Columns r,f,g,fprime,E,w,h,J. Integrates past a zero of f and stops at a
 * zero of g or at r_max. */
SELFSIM_API selfsim_status selfsim_profile(const selfsim_params* params, double a,
                                           const selfsim_ode_options* opts,
                                           selfsim_table** out);

typedef enum selfsim_verdict {
  SELFSIM_VERDICT_A = 0,
  SELFSIM_VERDICT_C = 1,
  SELFSIM_VERDICT_UNRESOLVED = 2
} selfsim_verdict;

typedef struct selfsim_classification {
  double a;
  selfsim_verdict verdict;
  double R;     /* A: first zero of f */
  double slope; /* A: f'(R) */
  double r_bar; /* C: where J turned negative */
  double r_end;
  double h_end;
  double g_over_f;
  int J_sign;
} selfsim_classification;

SELFSIM_API const char* selfsim_verdict_name(selfsim_verdict v);
SELFSIM_API selfsim_status selfsim_classify(const selfsim_params* params, double a,
                                            const selfsim_ode_options* opts,
                                            selfsim_classification* out);
/* Classifies a[0..n) on up to `threads` workers (0: hardware concurrency).
 * out[i] always corresponds to a[i]. */
SELFSIM_API selfsim_status selfsim_sweep(const selfsim_params* params, const double* a, size_t n,
                                         const selfsim_ode_options* opts, int threads,
                                         selfsim_classification* out);

typedef struct selfsim_ground_state {
  double a_lo;
  double a_hi;
  double a_star;
  double l_star;
  double c_star;
  double trust_radius;
  double plateau_r1;
  double plateau_r2;
  double plateau_variation;
  int iterations;
  int unresolved;
  double rel_tol_used;
} selfsim_ground_state;

SELFSIM_API selfsim_status selfsim_find_astar(const selfsim_params* params, double tol_a,
                                              const selfsim_ode_options* opts,
                                              selfsim_ground_state* out);

/* ---- Pohozaev diagnostics ------------------------------------------------ */

typedef struct selfsim_pohozaev_info {
  double M0, M1, M2, M3;
  double r_G;
  int degenerate;
} selfsim_pohozaev_info;

/* Columns r,alpha,beta,gamma,G_cubic,G_direct on n points of [r_lo, r_hi]. */
SELFSIM_API selfsim_status selfsim_pohozaev(const selfsim_params* params, double r_lo,
                                            double r_hi, size_t n, selfsim_pohozaev_info* info,
                                            selfsim_table** out);

/* Columns r,J,G,gsq along the trajectory of `a`. */
SELFSIM_API selfsim_status selfsim_pohozaev_along(const selfsim_params* params, double a,
                                                  const selfsim_ode_options* opts,
                                                  selfsim_table** out);

/* ---- PDE ------------------------------------------------------------------ */

typedef enum selfsim_init_kind {
  SELFSIM_INIT_EXP_TAIL = 0,
  SELFSIM_INIT_SEPARABLE = 1,
  SELFSIM_INIT_CUSTOM = 2
} selfsim_init_kind;

typedef struct selfsim_pde_options {
  double kappa0;
  selfsim_init_kind init;
  double T0;
  double eps_reg;
  double ext_tol;
  double R_inf;
  int M;
  double dt_theta;
  int time_order;
  int snapshots_per_decade;
  long max_steps;
  /* custom initial data, n_custom points, r increasing */
  const double* custom_r;
  const double* custom_u;
  size_t n_custom;
} selfsim_pde_options;

SELFSIM_API void selfsim_pde_options_default(selfsim_pde_options* out);

typedef struct selfsim_pde_result selfsim_pde_result;

typedef struct selfsim_pde_summary {
  double T_e;
  double rate_r2;
  double rate_exponent;
  long steps;
  long clamps;
  long monotonicity_violations;
  double supersolution_excess;
  size_t records;
  size_t snapshots;
  double a_star; /* profile used for comparison; 0 if none */
} selfsim_pde_summary;

/* `gs` may be NULL for exp_tail and custom data; then no frame comparison is
 * available. */
SELFSIM_API selfsim_status selfsim_pde_run(const selfsim_params* params,
                                           const selfsim_pde_options* opts,
                                           const selfsim_ground_state* gs,
                                           selfsim_pde_result** out);
SELFSIM_API void selfsim_pde_result_destroy(selfsim_pde_result* result);
SELFSIM_API selfsim_status selfsim_pde_summary_get(const selfsim_pde_result* result,
                                                   selfsim_pde_summary* out);
/* Columns t,umax,I,J,D,E,balance. */
SELFSIM_API selfsim_status selfsim_pde_records(const selfsim_pde_result* result,
                                               selfsim_table** out);
/* Columns frame,t,s,vmax,sup_error,energy. Needs a ground state. */
SELFSIM_API selfsim_status selfsim_pde_frames(const selfsim_pde_result* result,
                                              selfsim_table** out);
/* Columns r,u for snapshot k. */
SELFSIM_API selfsim_status selfsim_pde_snapshot(const selfsim_pde_result* result, size_t k,
                                                selfsim_table** out);
/* Columns r,v,f for snapshot k in self-similar variables (f = 0 without a
 * ground state). */
SELFSIM_API selfsim_status selfsim_pde_rescaled(const selfsim_pde_result* result, size_t k,
                                                selfsim_table** out);

/* ---- config files -------------------------------------------------------- */

typedef struct selfsim_config {
  int N;
  double p;
  selfsim_ode_options ode;
  selfsim_pde_options pde; /* custom_* fields are left empty */
  double tol_a;
  char out[1024];
} selfsim_config;

/* Reads a schema-1 JSON config. Keys absent from the file keep defaults;
 * unknown keys are SELFSIM_E_INVALID_ARGUMENT. */
SELFSIM_API selfsim_status selfsim_config_load(const char* path, selfsim_config* out);
SELFSIM_API void selfsim_config_default(selfsim_config* out);

/* ---- acceptance ---------------------------------------------------------- */

/* Called once per criterion. `report` is the formatted multi-line result. */
typedef void (*selfsim_verify_fn)(int id, int pass, const char* report, void* user);

/* Runs criterion `only` (1..13) or all of them (only = 0). `extended` adds
 * the second parameter point to the PDE criteria. *failures receives the
 * number of failed criteria. */
SELFSIM_API selfsim_status selfsim_verify(int only, int extended, selfsim_verify_fn fn,
                                          void* user, int* failures);

#ifdef __cplusplus
}
#endif

#endif
