// Copyright 2026 The relsearch Authors.
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


// extern "C" surface over the C++ core. Exceptions never cross this
// boundary; each entry point converts them to an rs_status and stashes the
// message for rs_last_error().

#include "relsearch/relsearch.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "relsearch/error.hpp"
#include "relsearch/flight.hpp"
#include "relsearch/sim.hpp"
#include "relsearch/solver.hpp"
#include "relsearch/sweep.hpp"

struct rs_policy {
  relsearch::Policy policy;
};

struct rs_sweep {
  std::vector<relsearch::SweepRecord> records;
};

namespace {

using namespace relsearch;

thread_local std::string g_last_error;

rs_status fail(rs_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `fn`, mapping library exceptions onto status codes.
template <typename Fn>
rs_status guarded(Fn&& fn) {
  try {
    fn();
    return RS_OK;
  } catch (const ProtocolError& e) {
    return fail(RS_ERR_PROTOCOL, e.what());
  } catch (const DomainError& e) {
    return fail(RS_ERR_DOMAIN, e.what());
  } catch (const FilterDegenerateError& e) {
    return fail(RS_ERR_FILTER, e.what());
  } catch (const ParseError& e) {
    return fail(RS_ERR_PARSE, e.what());
  } catch (const IoError& e) {
    return fail(RS_ERR_IO, e.what());
  } catch (const DigestMismatchError& e) {
    return fail(RS_ERR_DIGEST, e.what());
  } catch (const SolverError& e) {
    return fail(RS_ERR_SOLVER, e.what());
  } catch (const std::bad_alloc&) {
    return fail(RS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RS_ERR_INTERNAL, "unknown exception");
  }
}

ModelParams to_cpp(const rs_params& p) {
  return ModelParams{p.n, p.trans_prob, p.obs_base, p.reward_target, p.reward_oob, p.discount};
}

rs_params to_c(const ModelParams& p) {
  return rs_params{p.n, p.trans_prob, p.obs_base, p.reward_target, p.reward_oob, p.discount};
}

SolverConfig to_cpp(const rs_solver_config& c) {
  SolverConfig cfg;
  cfg.time_budget = std::chrono::duration<double>(c.time_budget_s);
  cfg.max_points = c.max_points;
  cfg.epsilon = c.epsilon;
  cfg.seed = c.seed;
  cfg.max_sweeps = c.max_sweeps;
  return cfg;
}

void copy_digest(const std::string& digest, char out[RS_DIGEST_SIZE]) {
  std::memset(out, 0, RS_DIGEST_SIZE);
  std::memcpy(out, digest.data(), std::min<std::size_t>(digest.size(), RS_DIGEST_SIZE - 1));
}

bool valid_agent(rs_agent a) {
  return a == RS_AGENT_POLICY || a == RS_AGENT_HEURISTIC || a == RS_AGENT_RANDOM;
}

// Builds the sim agent; the policy case also checks it matches `model`.
Agent make_agent(rs_agent agent, const rs_policy* policy, const Model& model) {
  switch (agent) {
    case RS_AGENT_HEURISTIC:
      return Baseline::heuristic;
    case RS_AGENT_RANDOM:
      return Baseline::random;
    case RS_AGENT_POLICY:
      break;
  }
  check_digest(policy->policy, model);
  return std::cref(policy->policy);
}

Belief make_belief(const Policy& pol, int z, const double* probs, std::size_t len) {
  const int n = pol.params.n;
  if (z < 1 || z > n) throw DomainError("altitude " + std::to_string(z) + " out of range");
  const auto cells = static_cast<std::size_t>(num_cells(n));
  if (len != cells) {
    throw DomainError("belief has " + std::to_string(len) + " cells, expected " +
                      std::to_string(cells));
  }
  Belief b{n, z, std::vector<double>(probs, probs + len)};
  for (double p : b.probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("belief entries must be finite and >= 0");
  }
  return b;
}

const double kDefaultSweepValues[] = {0.76, 0.82, 0.88, 0.94, 1.0};
const double kDefaultRewards[] = {10.0, 100.0, 1000.0};
const rs_sweep_policy kDefaultPolicies[] = {RS_SWEEP_POMDP, RS_SWEEP_HEURISTIC, RS_SWEEP_RANDOM};

template <typename T>
std::vector<T> list_or(const T* values, std::size_t count, const std::vector<T>& fallback) {
  if (values == nullptr && count == 0) return fallback;
  return std::vector<T>(values, values + count);
}

}  // namespace

extern "C" {

const char* rs_status_name(rs_status status) {
  switch (status) {
    case RS_OK: return "ok";
    case RS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RS_ERR_DOMAIN: return "domain error";
    case RS_ERR_PARSE: return "parse error";
    case RS_ERR_IO: return "i/o error";
    case RS_ERR_SOLVER: return "solver error";
    case RS_ERR_PROTOCOL: return "protocol error";
    case RS_ERR_FILTER: return "filter degenerate";
    case RS_ERR_DIGEST: return "digest mismatch";
    case RS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* rs_last_error(void) { return g_last_error.c_str(); }

const char* rs_version(void) { return "1.0.0"; }

const char* rs_action_name(int action) {
  if (action < 0 || action >= RS_NUM_ACTIONS) return nullptr;
  return to_string(static_cast<Action>(action)).data();
}

void rs_params_default(rs_params* out) {
  if (out != nullptr) *out = to_c(ModelParams{});
}

rs_status rs_params_validate(const rs_params* params) {
  if (params == nullptr) return fail(RS_ERR_INVALID_ARGUMENT, "params is NULL");
  return guarded([&] { validate(to_cpp(*params)); });
}

rs_status rs_params_digest(const rs_params* params, char out[RS_DIGEST_SIZE]) {
  if (params == nullptr || out == nullptr) return fail(RS_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] {
    const ModelParams p = to_cpp(*params);
    validate(p);
    copy_digest(params_digest(p), out);
  });
}

const char* rs_policy_kind_name(rs_policy_kind kind) {
  switch (kind) {
    case RS_POLICY_PBVI: return "pbvi";
    case RS_POLICY_QMDP: return "qmdp";
    case RS_POLICY_MDP: return "mdp";
  }
  return nullptr;
}

void rs_solver_config_default(rs_solver_config* out) {
  if (out == nullptr) return;
  const SolverConfig cfg;
  *out = rs_solver_config{cfg.time_budget.count(), cfg.max_points, cfg.epsilon, cfg.seed,
                          cfg.max_sweeps};
}

rs_status rs_solve(const rs_params* params, rs_policy_kind kind, const rs_solver_config* config,
                   rs_policy** out, rs_solve_stats* stats) {
  if (params == nullptr || out == nullptr) return fail(RS_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  if (rs_policy_kind_name(kind) == nullptr) return fail(RS_ERR_INVALID_ARGUMENT, "unknown policy kind");
  return guarded([&] {
    const Model model(to_cpp(*params));
    auto handle = std::make_unique<rs_policy>();
    SolveStats st;
    switch (kind) {
      case RS_POLICY_PBVI: {
        SolverConfig cfg;
        if (config != nullptr) cfg = to_cpp(*config);
        handle->policy = solve_pbvi(model, cfg, &st);
        break;
      }
      case RS_POLICY_QMDP:
        handle->policy = solve_qmdp(model);
        st.alphas = handle->policy.alpha_count();
        break;
      case RS_POLICY_MDP:
        handle->policy = solve_mdp(model);
        st.alphas = handle->policy.alpha_count();
        break;
    }
    if (stats != nullptr) {
      *stats = rs_solve_stats{st.points, st.sweeps, st.converged ? 1 : 0, st.seconds, st.alphas,
                              st.initial_value_history.empty() ? 0.0
                                                               : st.initial_value_history.back(),
                              st.last_improvement};
    }
    *out = handle.release();
  });
}

rs_status rs_policy_load(const char* path, rs_policy** out) {
  if (path == nullptr || out == nullptr) return fail(RS_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<rs_policy>();
    handle->policy = load_policy(std::filesystem::path(path));
    *out = handle.release();
  });
}

rs_status rs_policy_save(const rs_policy* policy, const char* path) {
  if (policy == nullptr || path == nullptr) return fail(RS_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] { save_policy(policy->policy, std::filesystem::path(path)); });
}

void rs_policy_destroy(rs_policy* policy) { delete policy; }

rs_status rs_policy_get_info(const rs_policy* policy, rs_policy_info* out) {
  if (policy == nullptr || out == nullptr) return fail(RS_ERR_INVALID_ARGUMENT, "NULL argument");
  const Policy& pol = policy->policy;
  out->params = to_c(pol.params);
  out->kind = static_cast<rs_policy_kind>(pol.kind);
  copy_digest(pol.digest, out->digest);
  out->alphas = pol.alpha_count();
  return RS_OK;
}

rs_status rs_policy_slice_size(const rs_policy* policy, int z, size_t* out) {
  if (policy == nullptr || out == nullptr) return fail(RS_ERR_INVALID_ARGUMENT, "NULL argument");
  const auto& slices = policy->policy.slices;
  if (z < 1 || static_cast<std::size_t>(z) > slices.size()) {
    return fail(RS_ERR_DOMAIN, "altitude " + std::to_string(z) + " out of range");
  }
  *out = slices[static_cast<std::size_t>(z - 1)].size();
  return RS_OK;
}

rs_status rs_policy_action(const rs_policy* policy, int z, const double* probs, size_t len,
                           int* action) {
  if (policy == nullptr || probs == nullptr || action == nullptr) {
    return fail(RS_ERR_INVALID_ARGUMENT, "NULL argument");
  }
  return guarded([&] {
    const Policy& pol = policy->policy;
    const Model model(pol.params);
    *action = index_of(policy_action(pol, model, make_belief(pol, z, probs, len)));
  });
}

rs_status rs_policy_value(const rs_policy* policy, int z, const double* probs, size_t len,
                          double* value) {
  if (policy == nullptr || probs == nullptr || value == nullptr) {
    return fail(RS_ERR_INVALID_ARGUMENT, "NULL argument");
  }
  return guarded([&] {
    const Policy& pol = policy->policy;
    const Model model(pol.params);
    *value = policy_value(pol, model, make_belief(pol, z, probs, len));
  });
}

const char* rs_agent_name(rs_agent agent) {
  switch (agent) {
    case RS_AGENT_POLICY: return "policy";
    case RS_AGENT_HEURISTIC: return "heuristic";
    case RS_AGENT_RANDOM: return "random";
  }
  return nullptr;
}

rs_status rs_evaluate(const rs_params* params, rs_agent agent, const rs_policy* policy,
                      int episodes, uint64_t base_seed, int cap, rs_eval_summary* out) {
  if (params == nullptr || out == nullptr) return fail(RS_ERR_INVALID_ARGUMENT, "NULL argument");
  if (!valid_agent(agent)) return fail(RS_ERR_INVALID_ARGUMENT, "unknown agent");
  if (agent == RS_AGENT_POLICY && policy == nullptr) {
    return fail(RS_ERR_INVALID_ARGUMENT, "policy agent needs a policy");
  }
  return guarded([&] {
    const Model model(to_cpp(*params));
    const EvalSummary s = evaluate(make_agent(agent, policy, model), model, episodes, base_seed, cap);
    *out = rs_eval_summary{s.episodes,        s.mean_reward, s.mean_steps, s.ci95_steps,
                           s.look_proportion, s.found_rate,  s.failures,   {}};
    for (int a = 0; a < RS_NUM_ACTIONS; ++a) {
      out->action_counts[a] = s.action_counts[static_cast<std::size_t>(a)];
    }
  });
}

rs_status rs_trace_write(const rs_params* params, rs_agent agent, const rs_policy* policy,
                         uint64_t seed, int cap, int with_beliefs, const char* path) {
  if (params == nullptr || path == nullptr) return fail(RS_ERR_INVALID_ARGUMENT, "NULL argument");
  if (!valid_agent(agent)) return fail(RS_ERR_INVALID_ARGUMENT, "unknown agent");
  if (agent == RS_AGENT_POLICY && policy == nullptr) {
    return fail(RS_ERR_INVALID_ARGUMENT, "policy agent needs a policy");
  }
  return guarded([&] {
    const Model model(to_cpp(*params));
    EpisodeOptions opts;
    opts.cap = cap;
    opts.record_trace = true;
    const EpisodeResult ep = run_episode(make_agent(agent, policy, model), model, seed, opts);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError(std::string("cannot open ") + path + " for writing");
    write_trace(os, ep, with_beliefs != 0);
    if (!os) throw IoError(std::string("write failed: ") + path);
  });
}

const char* rs_sweep_policy_name(rs_sweep_policy policy) {
  switch (policy) {
    case RS_SWEEP_POMDP:
    case RS_SWEEP_HEURISTIC:
    case RS_SWEEP_RANDOM:
      return to_string(static_cast<SweepPolicy>(policy)).data();
  }
  return nullptr;
}

rs_status rs_sweep_policy_parse(const char* name, rs_sweep_policy* out) {
  if (name == nullptr || out == nullptr) return fail(RS_ERR_INVALID_ARGUMENT, "NULL argument");
  const auto p = parse_sweep_policy(name);
  if (!p) return fail(RS_ERR_INVALID_ARGUMENT, std::string("unknown sweep policy '") + name + "'");
  *out = static_cast<rs_sweep_policy>(*p);
  return RS_OK;
}

const char* rs_sweep_metric_name(rs_sweep_metric metric) {
  switch (metric) {
    case RS_METRIC_MEAN_STEPS:
    case RS_METRIC_MEAN_REWARD:
    case RS_METRIC_CI95_STEPS:
    case RS_METRIC_LOOK_PROPORTION:
      return to_string(static_cast<SweepMetric>(metric)).data();
  }
  return nullptr;
}

rs_status rs_sweep_metric_parse(const char* name, rs_sweep_metric* out) {
  if (name == nullptr || out == nullptr) return fail(RS_ERR_INVALID_ARGUMENT, "NULL argument");
  const auto m = parse_sweep_metric(name);
  if (!m) return fail(RS_ERR_INVALID_ARGUMENT, std::string("unknown metric '") + name + "'");
  *out = static_cast<rs_sweep_metric>(*m);
  return RS_OK;
}

void rs_sweep_spec_default(rs_sweep_spec* out) {
  if (out == nullptr) return;
  const SweepSpec spec;
  rs_sweep_spec s{};
  s.trans_values = kDefaultSweepValues;
  s.trans_count = std::size(kDefaultSweepValues);
  s.obs_values = kDefaultSweepValues;
  s.obs_count = std::size(kDefaultSweepValues);
  s.reward_values = kDefaultRewards;
  s.reward_count = std::size(kDefaultRewards);
  s.policies = kDefaultPolicies;
  s.policy_count = std::size(kDefaultPolicies);
  s.episodes = spec.episodes;
  rs_solver_config_default(&s.solver);
  s.n = spec.n;
  s.base_seed = spec.base_seed;
  s.reward_oob = spec.reward_oob;
  s.discount = spec.discount;
  s.cap = spec.cap;
  s.cache_dir = nullptr;
  s.record_timing = 0;
  *out = s;
}

rs_status rs_sweep_run(const rs_sweep_spec* spec, rs_sweep** out) {
  if (spec == nullptr || out == nullptr) return fail(RS_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  for (std::size_t i = 0; i < spec->policy_count && spec->policies != nullptr; ++i) {
    if (rs_sweep_policy_name(spec->policies[i]) == nullptr) {
      return fail(RS_ERR_INVALID_ARGUMENT, "unknown sweep policy");
    }
  }
  return guarded([&] {
    const SweepSpec defaults;
    SweepSpec s;
    s.trans_values = list_or(spec->trans_values, spec->trans_count, defaults.trans_values);
    s.obs_values = list_or(spec->obs_values, spec->obs_count, defaults.obs_values);
    s.reward_values = list_or(spec->reward_values, spec->reward_count, defaults.reward_values);
    s.policies.clear();
    if (spec->policies == nullptr && spec->policy_count == 0) {
      s.policies = defaults.policies;
    } else {
      for (std::size_t i = 0; i < spec->policy_count; ++i) {
        s.policies.push_back(static_cast<SweepPolicy>(spec->policies[i]));
      }
    }
    s.episodes = spec->episodes;
    s.solver_cfg = to_cpp(spec->solver);
    s.n = spec->n;
    s.base_seed = spec->base_seed;
    s.reward_oob = spec->reward_oob;
    s.discount = spec->discount;
    s.cap = spec->cap;
    if (spec->cache_dir != nullptr) s.cache_dir = std::filesystem::path(spec->cache_dir);
    s.record_timing = spec->record_timing != 0;
    auto handle = std::make_unique<rs_sweep>();
    handle->records = run_sweep(s);
    *out = handle.release();
  });
}

size_t rs_sweep_size(const rs_sweep* sweep) { return sweep == nullptr ? 0 : sweep->records.size(); }

rs_status rs_sweep_get(const rs_sweep* sweep, size_t index, rs_sweep_record* out) {
  if (sweep == nullptr || out == nullptr) return fail(RS_ERR_INVALID_ARGUMENT, "NULL argument");
  if (index >= sweep->records.size()) {
    return fail(RS_ERR_INVALID_ARGUMENT, "record index " + std::to_string(index) + " out of range");
  }
  const SweepRecord& r = sweep->records[index];
  *out = rs_sweep_record{r.trans,          r.obs,
                         r.reward_magnitude, static_cast<rs_sweep_policy>(r.policy),
                         r.mean_steps,     r.mean_reward,
                         r.ci95_steps,     r.look_proportion,
                         r.solve_seconds,  r.error.empty() ? nullptr : r.error.c_str()};
  return RS_OK;
}

rs_status rs_sweep_write_csv(const rs_sweep* sweep, const char* path) {
  if (sweep == nullptr || path == nullptr) return fail(RS_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&] { write_csv(sweep->records, std::filesystem::path(path)); });
}

rs_status rs_sweep_write_heatmap(const rs_sweep* sweep, rs_sweep_policy policy,
                                 rs_sweep_metric metric, const char* path) {
  if (sweep == nullptr || path == nullptr) return fail(RS_ERR_INVALID_ARGUMENT, "NULL argument");
  if (rs_sweep_policy_name(policy) == nullptr || rs_sweep_metric_name(metric) == nullptr) {
    return fail(RS_ERR_INVALID_ARGUMENT, "unknown heatmap policy or metric");
  }
  return guarded([&] {
    write_heatmap_svg(sweep->records, static_cast<SweepPolicy>(policy),
                      static_cast<SweepMetric>(metric), std::filesystem::path(path));
  });
}

void rs_sweep_destroy(rs_sweep* sweep) { delete sweep; }

void rs_fly_options_default(rs_fly_options* out) {
  if (out == nullptr) return;
  const FlyOptions opts;
  *out = rs_fly_options{static_cast<int>(opts.poll_interval.count()),
                        static_cast<int>(opts.idle_timeout.count()), nullptr, nullptr};
}

rs_status rs_fly(const rs_policy* policy, const char* link_path, const rs_fly_options* options) {
  if (policy == nullptr || link_path == nullptr) {
    return fail(RS_ERR_INVALID_ARGUMENT, "NULL argument");
  }
  rs_fly_options o;
  rs_fly_options_default(&o);
  if (options != nullptr) o = *options;
  if (o.poll_interval_ms < 0 || o.idle_timeout_ms < 0) {
    return fail(RS_ERR_INVALID_ARGUMENT, "negative fly interval");
  }
  return guarded([&] {
    FlyOptions opts;
    opts.poll_interval = std::chrono::milliseconds(o.poll_interval_ms);
    opts.idle_timeout = std::chrono::milliseconds(o.idle_timeout_ms);
    std::ofstream log_file;
    if (o.log_path != nullptr) {
      if (std::strcmp(o.log_path, "-") == 0) {
        opts.log = &std::cerr;
      } else {
        log_file.open(o.log_path, std::ios::app);
        if (!log_file) throw IoError(std::string("cannot open log ") + o.log_path);
        opts.log = &log_file;
      }
    }
    if (o.dump_belief_path != nullptr) opts.dump_belief = std::filesystem::path(o.dump_belief_path);
    fly(policy->policy, link_path, opts);
  });
}

}  // extern "C"
