// Copyright 2026 The GPASV Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the GPASV library. Objects are opaque handles created by
 * gpasv_*_create / _load functions and released by the matching _destroy.
 * Every fallible call returns a gpasv_status; on failure gpasv_last_error()
 * describes the problem for the calling thread until its next failing call. */

#ifndef GPASV_H
#define GPASV_H

#include <stdint.h>

#if defined(_WIN32)
#define GPASV_API __declspec(dllexport)
#else
#define GPASV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gpasv_status {
  GPASV_OK = 0,
  GPASV_E_INVALID_ARGUMENT = 1,
  GPASV_E_PARSE = 2,
  GPASV_E_LIMIT_EXCEEDED = 3,
  GPASV_E_MISSING_UTILITY = 4,
  GPASV_E_IO = 5,
  GPASV_E_INTERNAL = 6
} gpasv_status;

typedef struct gpasv_params gpasv_params;
typedef struct gpasv_oracle gpasv_oracle;
typedef struct gpasv_game gpasv_game;
typedef struct gpasv_batch gpasv_batch;
typedef struct gpasv_sweep_report gpasv_sweep_report;
typedef struct gpasv_mixing_result gpasv_mixing_result;

GPASV_API const char* gpasv_version(void);
GPASV_API const char* gpasv_last_error(void);
GPASV_API const char* gpasv_status_name(gpasv_status status);
GPASV_API void gpasv_free_string(char* s);

/* ---- distribution parameters ------------------------------------------ */

/* omega is row-major n*n; omega[i*n+j] is the strength of "i should precede j". */
GPASV_API gpasv_status gpasv_params_create(int n, const double* omega, double beta, const double* lambda,
                                           gpasv_params** out);
/* lambda_i = exp(-alpha * z_i). */
GPASV_API gpasv_status gpasv_params_create_latent(int n, const double* omega, double beta, const double* z,
                                                  double alpha, gpasv_params** out);
GPASV_API gpasv_status gpasv_params_load_json(const char* path, gpasv_params** out);
GPASV_API void gpasv_params_destroy(gpasv_params* params);
GPASV_API int gpasv_params_n(const gpasv_params* params);
GPASV_API double gpasv_params_beta(const gpasv_params* params);
GPASV_API gpasv_status gpasv_params_lambda(const gpasv_params* params, double* out);
/* Player label from the graph file, or NULL. */
GPASV_API const char* gpasv_params_player_label(const gpasv_params* params, int i);
GPASV_API gpasv_status gpasv_params_log_pmf(const gpasv_params* params, const int* order, double* out);

/* ---- utility oracles ----------------------------------------------------- */

/* masks[k] has bit i set when player i belongs to term k. */
GPASV_API gpasv_status gpasv_oracle_sou(int n, int n_terms, const uint64_t* masks, const double* coeffs,
                                        gpasv_oracle** out);
GPASV_API gpasv_status gpasv_oracle_sor(int n, int n_terms, const uint64_t* masks, const double* coeffs,
                                        gpasv_oracle** out);
/* CSV rows `mask,value`; mask 0 must be present with value 0. */
GPASV_API gpasv_status gpasv_oracle_table_load(const char* path, int n, gpasv_oracle** out);

/* Returns 0 and writes *value on success; any other return marks the mask as unavailable.
 * Must be safe to call concurrently when threads > 1 is requested. */
typedef int (*gpasv_utility_fn)(uint64_t mask, double* value, void* user);
GPASV_API gpasv_status gpasv_oracle_callback(int n, gpasv_utility_fn fn, void* user, gpasv_oracle** out);

/* Memoizing wrapper; persist_path may be NULL. A persisted file is loaded first and
 * appended with every new evaluation. */
GPASV_API gpasv_status gpasv_oracle_cached(const gpasv_oracle* inner, const char* persist_path, gpasv_oracle** out);
GPASV_API gpasv_status gpasv_oracle_cache_stats(const gpasv_oracle* oracle, int64_t* distinct_evals,
                                                int64_t* total_calls, int64_t* loaded);
GPASV_API gpasv_status gpasv_oracle_evaluate(const gpasv_oracle* oracle, uint64_t mask, double* out);
GPASV_API int gpasv_oracle_n(const gpasv_oracle* oracle);
GPASV_API void gpasv_oracle_destroy(gpasv_oracle* oracle);

/* ---- game specifications ------------------------------------------------- */

/* n <= 0 means unknown (the game file must then state it). */
GPASV_API gpasv_status gpasv_game_load_json(const char* path, int n, gpasv_game** out);
GPASV_API int gpasv_game_n(const gpasv_game* game);
GPASV_API gpasv_status gpasv_game_oracle(const gpasv_game* game, gpasv_oracle** out);
/* Scenario presets carry their own parameters and closed-form target. */
GPASV_API int gpasv_game_has_params(const gpasv_game* game);
GPASV_API gpasv_status gpasv_game_params(const gpasv_game* game, gpasv_params** out);
GPASV_API int gpasv_game_has_target(const gpasv_game* game);
GPASV_API gpasv_status gpasv_game_target(const gpasv_game* game, double* out);
GPASV_API void gpasv_game_destroy(gpasv_game* game);

/* ---- sampling ------------------------------------------------------------ */

typedef struct gpasv_chain_options {
  int64_t n_samples;  /* default 1000 */
  int64_t burn_in;    /* < 0 selects ceil(n^2.5) */
  int64_t thinning;   /* default 1000 */
  double lazy_prob;   /* default 0.5 */
  uint64_t seed;
} gpasv_chain_options;

GPASV_API void gpasv_chain_options_init(gpasv_chain_options* options);
GPASV_API gpasv_status gpasv_sample(const gpasv_params* params, const gpasv_chain_options* options, gpasv_batch** out);
GPASV_API int64_t gpasv_batch_size(const gpasv_batch* batch);
GPASV_API int gpasv_batch_n(const gpasv_batch* batch);
GPASV_API gpasv_status gpasv_batch_get(const gpasv_batch* batch, int64_t k, int* order);
GPASV_API gpasv_status gpasv_batch_save(const gpasv_batch* batch, const char* path);
GPASV_API gpasv_status gpasv_batch_load(const char* path, const gpasv_params* params, gpasv_batch** out);
GPASV_API void gpasv_batch_destroy(gpasv_batch* batch);

/* ---- estimation ---------------------------------------------------------- */

typedef struct gpasv_estimate_info {
  int64_t n_samples;
  int64_t n_reused;
  int64_t n_fresh;
  double ess;
  int64_t distinct_evals; /* -1 without a cache */
  uint64_t params_fingerprint;
} gpasv_estimate_info;

/* values has n entries; info may be NULL. */
GPASV_API gpasv_status gpasv_direct_mc(const gpasv_batch* batch, const gpasv_oracle* oracle, int threads,
                                       double* values, gpasv_estimate_info* info);
/* Runs `replicates` independent chains (seeds derived from options->seed) and averages their
 * direct estimates; std (may be NULL) holds the across-replicate standard deviation. */
GPASV_API gpasv_status gpasv_estimate_value(const gpasv_params* params, const gpasv_oracle* oracle,
                                            const gpasv_chain_options* options, int replicates, int threads,
                                            double* values, double* std, gpasv_estimate_info* info);
GPASV_API gpasv_status gpasv_snis_weights(const gpasv_params* old_params, const gpasv_params* new_params,
                                          const gpasv_batch* batch, double* weights);
GPASV_API gpasv_status gpasv_ess(const double* weights, int64_t count, double* out);
GPASV_API gpasv_status gpasv_snis_estimate(const double* weights, const gpasv_batch* batch,
                                           const gpasv_oracle* oracle, double* values, gpasv_estimate_info* info);
/* reused or fresh may be NULL (treated as empty); weights pair with reused. */
GPASV_API gpasv_status gpasv_hybrid_estimate(const double* weights, const gpasv_batch* reused,
                                             const gpasv_batch* fresh, const gpasv_oracle* oracle, double* values,
                                             gpasv_estimate_info* info);

typedef struct gpasv_surrogate_options {
  int64_t free_samples;        /* utility-free permutations, default 100000 */
  double train_fraction;       /* default 0.2 */
  int64_t train_cap;           /* default 200000 */
  double interaction_fraction; /* default 0.1 */
  uint64_t seed;
} gpasv_surrogate_options;

GPASV_API void gpasv_surrogate_options_init(gpasv_surrogate_options* options);
/* Direct MC on a chain run fixes the distinct-evaluation budget; linear and quadratic
 * two-stage surrogate estimates spend the same budget. Output arrays have n entries. */
GPASV_API gpasv_status gpasv_matched_budget(const gpasv_params* params, const gpasv_oracle* oracle,
                                            const gpasv_chain_options* chain, const gpasv_surrogate_options* options,
                                            double* direct, double* linear, double* quadratic, int64_t* k_eval,
                                            int64_t* k_train);

/* ---- exact oracles ------------------------------------------------------- */

/* Enumeration; n <= 10. */
GPASV_API gpasv_status gpasv_exact_values(const gpasv_params* params, const gpasv_oracle* oracle, double* values);
/* Subset dynamic program; n <= 24. p is row-major n*n with p[i*n+j] = P(i precedes j). */
GPASV_API gpasv_status gpasv_exact_pairwise(const gpasv_params* params, double* p, double* max_asymmetry);
GPASV_API gpasv_status gpasv_exact_log_normalizer(const gpasv_params* params, double* out);

/* ---- priority sweeps ----------------------------------------------------- */

typedef enum gpasv_sweep_axis { GPASV_AXIS_ALPHA = 0, GPASV_AXIS_BETA = 1, GPASV_AXIS_JOINT = 2 } gpasv_sweep_axis;

typedef struct gpasv_sweep_options {
  int axis;
  const double* temps; /* non-decreasing, >= 0; NULL selects 0,1,2,4,8,16,32 */
  int n_temps;
  int64_t budget;        /* default 1000 */
  int reuse;             /* default 1 */
  int64_t refresh_floor; /* default 500 */
  double fixed_alpha;
  double fixed_beta;
  uint64_t seed;
  int64_t burn_in; /* < 0 selects ceil(n^2.5) */
  int64_t thinning;
  double lazy_prob;
  int threads;
  const int* group; /* optional player subset for group summaries */
  int group_size;
  const double* latent; /* optional z; NULL derives it from the parameters */
} gpasv_sweep_options;

typedef struct gpasv_sweep_setting_info {
  double temp;
  double alpha;
  double beta;
  double ess_in;
  int64_t n_new;
  int64_t n_reused;
  int full_refresh;
  int64_t distinct_evals;
  int64_t oracle_calls;
  double group_sum;           /* NaN without a group */
  double group_mean_position; /* NaN without a group */
} gpasv_sweep_setting_info;

GPASV_API void gpasv_sweep_options_init(gpasv_sweep_options* options);
/* On an oracle failure the partial report is still stored in *out and the failure status
 * is returned. */
GPASV_API gpasv_status gpasv_sweep_run(const gpasv_params* params, const gpasv_oracle* oracle,
                                       const gpasv_sweep_options* options, gpasv_sweep_report** out);
GPASV_API int gpasv_sweep_report_size(const gpasv_sweep_report* report);
GPASV_API int gpasv_sweep_report_complete(const gpasv_sweep_report* report);
GPASV_API int64_t gpasv_sweep_report_total_fresh(const gpasv_sweep_report* report);
GPASV_API gpasv_status gpasv_sweep_report_setting(const gpasv_sweep_report* report, int k,
                                                  gpasv_sweep_setting_info* info, double* values,
                                                  double* mean_position);
/* Caller releases *out with gpasv_free_string. */
GPASV_API gpasv_status gpasv_sweep_report_json(const gpasv_sweep_report* report, char** out);
GPASV_API void gpasv_sweep_report_destroy(gpasv_sweep_report* report);

/* ---- mixing diagnostic --------------------------------------------------- */

typedef enum gpasv_init_scheme { GPASV_INIT_GREEDY = 0, GPASV_INIT_RANDOM = 1 } gpasv_init_scheme;

typedef struct gpasv_mixing_options {
  int n_chains;    /* default 1000 */
  double epsilon;  /* default 0.25 */
  double guard;    /* default 0.02 */
  int init;
  uint64_t seed;
  double lazy_prob;
  int threads;
  int full_curve;
  int64_t horizon; /* <= 0 selects ceil(n^3 ln n) */
} gpasv_mixing_options;

GPASV_API void gpasv_mixing_options_init(gpasv_mixing_options* options);
GPASV_API gpasv_status gpasv_mixing_run(const gpasv_params* params, const gpasv_mixing_options* options,
                                        gpasv_mixing_result** out);
/* Returns 1 and writes *t when a crossing was certified, 0 when not mixed by the horizon. */
GPASV_API int gpasv_mixing_crossing(const gpasv_mixing_result* result, int64_t* t);
GPASV_API int64_t gpasv_mixing_horizon(const gpasv_mixing_result* result);
GPASV_API int gpasv_mixing_point_count(const gpasv_mixing_result* result);
/* Checkpoints first, then binary-search probes. */
GPASV_API gpasv_status gpasv_mixing_point(const gpasv_mixing_result* result, int k, int64_t* t, double* deviation,
                                          int* is_probe);
GPASV_API void gpasv_mixing_result_destroy(gpasv_mixing_result* result);

#ifdef __cplusplus
}
#endif

#endif /* GPASV_H */
