/* Copyright 2026 The relsearch Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to librelsearch.
 *
 * Every function that can fail returns an rs_status. On failure the
 * message is available from rs_last_error() on the same thread until the
 * next failing call. Handles are opaque and owned by the caller; release
 * them with the matching *_destroy function (NULL is accepted).
 */

#ifndef RELSEARCH_RELSEARCH_H_
#define RELSEARCH_RELSEARCH_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(RELSEARCH_BUILDING_LIBRARY)
#define RS_API __declspec(dllexport)
#else
#define RS_API __declspec(dllimport)
#endif
#else
#define RS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rs_status {
  RS_OK = 0,
  RS_ERR_INVALID_ARGUMENT = 1, /* NULL handle, bad enum, bad option */
  RS_ERR_DOMAIN = 2,           /* parameters or coordinates out of range */
  RS_ERR_PARSE = 3,            /* malformed policy or CSV file */
  RS_ERR_IO = 4,
  RS_ERR_SOLVER = 5, /* time budget exhausted before the first sweep */
  RS_ERR_PROTOCOL = 6,
  RS_ERR_FILTER = 7, /* belief update hit an impossible observation */
  RS_ERR_DIGEST = 8, /* policy was solved for different parameters */
  RS_ERR_INTERNAL = 9
} rs_status;

RS_API const char* rs_status_name(rs_status status);
RS_API const char* rs_last_error(void);
RS_API const char* rs_version(void);

/* Actions in canonical order. */
enum { RS_NUM_ACTIONS = 7 };
RS_API const char* rs_action_name(int action);

/* Length of a digest string including the terminating NUL. */
enum { RS_DIGEST_SIZE = 17 };

typedef struct rs_params {
  int n;
  double trans_prob;
  double obs_base;
  double reward_target;
  double reward_oob;
  double discount;
} rs_params;

RS_API void rs_params_default(rs_params* out);
RS_API rs_status rs_params_validate(const rs_params* params);
RS_API rs_status rs_params_digest(const rs_params* params, char out[RS_DIGEST_SIZE]);

typedef enum rs_policy_kind { RS_POLICY_PBVI = 0, RS_POLICY_QMDP = 1, RS_POLICY_MDP = 2 } rs_policy_kind;

RS_API const char* rs_policy_kind_name(rs_policy_kind kind);

typedef struct rs_solver_config {
  double time_budget_s;
  int max_points;
  double epsilon;
  uint64_t seed;
  int max_sweeps; /* 0 = no limit */
} rs_solver_config;

RS_API void rs_solver_config_default(rs_solver_config* out);

typedef struct rs_solve_stats {
  int points;
  int sweeps;
  int converged;
  double seconds;
  size_t alphas;
  double initial_value; /* mean lower bound over the uniform beliefs */
  double last_improvement;
} rs_solve_stats;

typedef struct rs_policy rs_policy;

/* `config` and `stats` may be NULL; config is ignored for qmdp and mdp. */
RS_API rs_status rs_solve(const rs_params* params, rs_policy_kind kind,
                          const rs_solver_config* config, rs_policy** out,
                          rs_solve_stats* stats);
RS_API rs_status rs_policy_load(const char* path, rs_policy** out);
RS_API rs_status rs_policy_save(const rs_policy* policy, const char* path);
RS_API void rs_policy_destroy(rs_policy* policy);

typedef struct rs_policy_info {
  rs_params params;
  rs_policy_kind kind;
  char digest[RS_DIGEST_SIZE];
  size_t alphas;
} rs_policy_info;

RS_API rs_status rs_policy_get_info(const rs_policy* policy, rs_policy_info* out);
/* Number of alpha vectors in the slice for altitude z (1-based). */
RS_API rs_status rs_policy_slice_size(const rs_policy* policy, int z, size_t* out);

/* Belief queries. `probs` holds (2n-1)^2 cell probabilities, x fastest. */
RS_API rs_status rs_policy_action(const rs_policy* policy, int z, const double* probs,
                                  size_t len, int* action);
RS_API rs_status rs_policy_value(const rs_policy* policy, int z, const double* probs,
                                 size_t len, double* value);

typedef enum rs_agent { RS_AGENT_POLICY = 0, RS_AGENT_HEURISTIC = 1, RS_AGENT_RANDOM = 2 } rs_agent;

RS_API const char* rs_agent_name(rs_agent agent);

typedef struct rs_eval_summary {
  int episodes;
  double mean_reward;
  double mean_steps;
  double ci95_steps;
  double look_proportion;
  double found_rate;
  int failures;
  long action_counts[RS_NUM_ACTIONS];
} rs_eval_summary;

/* For RS_AGENT_POLICY, `policy` must be non-NULL and solved for `params`,
 * otherwise RS_ERR_DIGEST. Baselines ignore `policy`. */
RS_API rs_status rs_evaluate(const rs_params* params, rs_agent agent, const rs_policy* policy,
                             int episodes, uint64_t base_seed, int cap, rs_eval_summary* out);

/* Runs one episode with `seed` and writes its step trace to `path`. */
RS_API rs_status rs_trace_write(const rs_params* params, rs_agent agent,
                                const rs_policy* policy, uint64_t seed, int cap,
                                int with_beliefs, const char* path);

typedef enum rs_sweep_policy {
  RS_SWEEP_POMDP = 0,
  RS_SWEEP_HEURISTIC = 1,
  RS_SWEEP_RANDOM = 2
} rs_sweep_policy;

typedef enum rs_sweep_metric {
  RS_METRIC_MEAN_STEPS = 0,
  RS_METRIC_MEAN_REWARD = 1,
  RS_METRIC_CI95_STEPS = 2,
  RS_METRIC_LOOK_PROPORTION = 3
} rs_sweep_metric;

RS_API const char* rs_sweep_policy_name(rs_sweep_policy policy);
RS_API rs_status rs_sweep_policy_parse(const char* name, rs_sweep_policy* out);
RS_API const char* rs_sweep_metric_name(rs_sweep_metric metric);
RS_API rs_status rs_sweep_metric_parse(const char* name, rs_sweep_metric* out);

/* Array fields are borrowed for the duration of rs_sweep_run. A NULL array
 * with count 0 selects the default list. */
typedef struct rs_sweep_spec {
  const double* trans_values;
  size_t trans_count;
  const double* obs_values;
  size_t obs_count;
  const double* reward_values;
  size_t reward_count;
  const rs_sweep_policy* policies;
  size_t policy_count;
  int episodes;
  rs_solver_config solver;
  int n;
  uint64_t base_seed;
  double reward_oob;
  double discount;
  int cap;
  const char* cache_dir; /* NULL disables the policy cache */
  int record_timing;
} rs_sweep_spec;

RS_API void rs_sweep_spec_default(rs_sweep_spec* out);

typedef struct rs_sweep_record {
  double trans;
  double obs;
  double reward;
  rs_sweep_policy policy;
  double mean_steps;
  double mean_reward;
  double ci95_steps;
  double look_proportion;
  double solve_seconds;
  const char* error; /* NULL unless the cell's solve failed; owned by the sweep */
} rs_sweep_record;

typedef struct rs_sweep rs_sweep;

RS_API rs_status rs_sweep_run(const rs_sweep_spec* spec, rs_sweep** out);
RS_API size_t rs_sweep_size(const rs_sweep* sweep);
RS_API rs_status rs_sweep_get(const rs_sweep* sweep, size_t index, rs_sweep_record* out);
RS_API rs_status rs_sweep_write_csv(const rs_sweep* sweep, const char* path);
RS_API rs_status rs_sweep_write_heatmap(const rs_sweep* sweep, rs_sweep_policy policy,
                                        rs_sweep_metric metric, const char* path);
RS_API void rs_sweep_destroy(rs_sweep* sweep);

typedef struct rs_fly_options {
  int poll_interval_ms;
  int idle_timeout_ms;  /* 0 waits forever */
  const char* log_path; /* NULL: no log, "-": stderr */
  const char* dump_belief_path;
} rs_fly_options;

RS_API void rs_fly_options_default(rs_fly_options* out);

/* Serves the link file until the `A done` handshake is on disk. */
RS_API rs_status rs_fly(const rs_policy* policy, const char* link_path,
                        const rs_fly_options* options);

#ifdef __cplusplus
}
#endif

#endif /* RELSEARCH_RELSEARCH_H_ */
