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


// relsearch command-line tool. Talks to the library only through the C API.

#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "relsearch/relsearch.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// Raised by check() so that every failing C call ends the run the same way.
struct Failure {
  rs_status status;
  std::string message;
};

void check(rs_status status, const std::string& context = {}) {
  if (status == RS_OK) return;
  std::string msg = context.empty() ? "" : context + ": ";
  msg += rs_status_name(status);
  if (*rs_last_error() != '\0') msg += std::string(": ") + rs_last_error();
  throw Failure{status, msg};
}

struct ModelFlags {
  rs_params params{};
  std::vector<CLI::Option*> options;

  void attach(CLI::App* cmd) {
    rs_params_default(&params);
    options = {
        cmd->add_option("--n", params.n, "grid side length")->capture_default_str(),
        cmd->add_option("--trans", params.trans_prob, "probability a motion executes as intended")
            ->capture_default_str(),
        cmd->add_option("--obs", params.obs_base, "observation accuracy base")
            ->capture_default_str(),
        cmd->add_option("--r0", params.reward_target, "reward for reaching the target")
            ->capture_default_str(),
        cmd->add_option("--r1", params.reward_oob, "reward for a bump")->capture_default_str(),
        cmd->add_option("--gamma", params.discount, "discount factor")->capture_default_str(),
    };
  }

  bool any_given() const {
    for (const CLI::Option* o : options) {
      if (o->count() > 0) return true;
    }
    return false;
  }

  // Overlays only the flags given on the command line onto `base`.
  rs_params overlay(rs_params base) const {
    if (options[0]->count() > 0) base.n = params.n;
    if (options[1]->count() > 0) base.trans_prob = params.trans_prob;
    if (options[2]->count() > 0) base.obs_base = params.obs_base;
    if (options[3]->count() > 0) base.reward_target = params.reward_target;
    if (options[4]->count() > 0) base.reward_oob = params.reward_oob;
    if (options[5]->count() > 0) base.discount = params.discount;
    return base;
  }
};

struct SolverFlags {
  rs_solver_config config{};

  void attach(CLI::App* cmd) {
    rs_solver_config_default(&config);
    cmd->add_option("--budget-sweeps", config.max_sweeps, "stop after this many backup sweeps (0: none)")
        ->capture_default_str();
    cmd->add_option("--time-budget", config.time_budget_s, "wall-clock cap in seconds")
        ->capture_default_str();
    cmd->add_option("--max-points", config.max_points, "belief point budget")->capture_default_str();
    cmd->add_option("--epsilon", config.epsilon, "convergence threshold")->capture_default_str();
  }
};

std::string digest_of(const rs_params& p) {
  char digest[RS_DIGEST_SIZE];
  check(rs_params_digest(&p, digest), "params");
  return digest;
}

void print_params(const rs_params& p, const std::string& digest) {
  std::printf("params n=%d trans=%.15g obs=%.15g r0=%.15g r1=%.15g gamma=%.15g\n", p.n,
              p.trans_prob, p.obs_base, p.reward_target, p.reward_oob, p.discount);
  std::printf("digest %s\n", digest.c_str());
}

struct PolicyHandle {
  rs_policy* ptr = nullptr;
  PolicyHandle() = default;
  PolicyHandle(const PolicyHandle&) = delete;
  PolicyHandle& operator=(const PolicyHandle&) = delete;
  ~PolicyHandle() { rs_policy_destroy(ptr); }
};

struct SweepHandle {
  rs_sweep* ptr = nullptr;
  SweepHandle() = default;
  SweepHandle(const SweepHandle&) = delete;
  SweepHandle& operator=(const SweepHandle&) = delete;
  ~SweepHandle() { rs_sweep_destroy(ptr); }
};

rs_policy_info load(const std::string& path, PolicyHandle& handle) {
  check(rs_policy_load(path.c_str(), &handle.ptr), path);
  rs_policy_info info;
  check(rs_policy_get_info(handle.ptr, &info));
  return info;
}

// ---- solve -----------------------------------------------------------------

struct SolveArgs {
  ModelFlags model;
  SolverFlags solver;
  std::string kind = "pbvi";
  std::uint64_t seed = 0;
  std::string out;
};

void run_solve(const SolveArgs& a) {
  rs_policy_kind kind = RS_POLICY_PBVI;
  if (a.kind == "qmdp") kind = RS_POLICY_QMDP;
  if (a.kind == "mdp") kind = RS_POLICY_MDP;
  print_params(a.model.params, digest_of(a.model.params));
  rs_solver_config cfg = a.solver.config;
  cfg.seed = a.seed;
  PolicyHandle pol;
  rs_solve_stats st;
  check(rs_solve(&a.model.params, kind, &cfg, &pol.ptr, &st), "solve");
  check(rs_policy_save(pol.ptr, a.out.c_str()), a.out);
  std::printf("kind %s\n", rs_policy_kind_name(kind));
  if (kind == RS_POLICY_PBVI) {
    std::printf("points %d\nsweeps %d\nconverged %s\nlast_improvement %.6g\ninitial_value %.6g\n",
                st.points, st.sweeps, st.converged ? "yes" : "no", st.last_improvement,
                st.initial_value);
    std::fprintf(stderr, "solve time %.2fs\n", st.seconds);
  }
  std::printf("alphas %zu\nwrote %s\n", st.alphas, a.out.c_str());
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
  ModelFlags model;
  std::string policy;
  std::string baseline;
  int episodes = 1000;
  std::uint64_t seed = 0;
  int cap = 500;
  std::string csv;
  std::string trace;
  bool dump_belief = false;
};

void run_eval(const EvalArgs& a) {
  PolicyHandle pol;
  rs_params params = a.model.params;
  rs_agent agent = a.baseline == "random" ? RS_AGENT_RANDOM : RS_AGENT_HEURISTIC;
  std::string label = a.baseline;
  if (!a.policy.empty()) {
    const rs_policy_info info = load(a.policy, pol);
    agent = RS_AGENT_POLICY;
    label = rs_policy_kind_name(info.kind);
    params = a.model.overlay(info.params);
    const std::string wanted = digest_of(params);
    print_params(params, wanted);
    if (wanted != info.digest) {
      throw Failure{RS_ERR_DIGEST, std::string("policy ") + a.policy + " was solved for digest " +
                                       info.digest + ", flags ask for " + wanted};
    }
  } else {
    print_params(params, digest_of(params));
  }

  rs_eval_summary s;
  check(rs_evaluate(&params, agent, pol.ptr, a.episodes, a.seed, a.cap, &s), "eval");
  std::printf("%-16s %s\n", "policy", label.c_str());
  std::printf("%-16s %d\n", "episodes", s.episodes);
  std::printf("%-16s %.6f\n", "mean_reward", s.mean_reward);
  std::printf("%-16s %.4f\n", "mean_steps", s.mean_steps);
  std::printf("%-16s %.4f\n", "ci95_steps", s.ci95_steps);
  std::printf("%-16s %.4f\n", "look_proportion", s.look_proportion);
  std::printf("%-16s %.4f\n", "found_rate", s.found_rate);
  std::printf("%-16s %d\n", "failures", s.failures);
  for (int i = 0; i < RS_NUM_ACTIONS; ++i) {
    std::printf("%-16s %ld\n", (std::string("count_") + rs_action_name(i)).c_str(),
                s.action_counts[i]);
  }

  if (!a.csv.empty()) {
    std::ofstream os(a.csv, std::ios::binary | std::ios::trunc);
    if (!os) throw Failure{RS_ERR_IO, "cannot open " + a.csv + " for writing"};
    os << "policy,episodes,mean_reward,mean_steps,ci95_steps,look_proportion,found_rate,failures\n";
    char row[512];
    std::snprintf(row, sizeof row, "%s,%d,%.6g,%.6g,%.6g,%.6g,%.6g,%d\n", label.c_str(),
                  s.episodes, s.mean_reward, s.mean_steps, s.ci95_steps, s.look_proportion,
                  s.found_rate, s.failures);
    os << row;
    if (!os) throw Failure{RS_ERR_IO, "write failed: " + a.csv};
  }
  if (!a.trace.empty()) {
    check(rs_trace_write(&params, agent, pol.ptr, a.seed, a.cap, a.dump_belief ? 1 : 0,
                         a.trace.c_str()),
          a.trace);
  }
}

// ---- sweep -----------------------------------------------------------------

struct SweepArgs {
  SolverFlags solver;
  std::vector<double> trans{0.76, 0.82, 0.88, 0.94, 1.0};
  std::vector<double> obs{0.76, 0.82, 0.88, 0.94, 1.0};
  std::vector<double> rewards{10.0};
  std::vector<std::string> policies{"pomdp", "heuristic", "random"};
  int episodes = 1000;
  int n = 7;
  double r1 = -1.0;
  double gamma = 0.95;
  int cap = 500;
  std::uint64_t seed = 0;
  std::uint64_t solver_seed = 0;
  std::string cache_dir;
  bool timing = false;
  std::string out;
  std::vector<std::string> heatmaps;
};

struct HeatmapRequest {
  rs_sweep_policy policy;
  rs_sweep_metric metric;
  std::string path;
};

HeatmapRequest parse_heatmap(const std::string& spec) {
  const auto first = spec.find(':');
  const auto second = first == std::string::npos ? first : spec.find(':', first + 1);
  if (second == std::string::npos || second + 1 >= spec.size()) {
    throw CLI::ValidationError("--heatmap", "expected policy:metric:path, got '" + spec + "'");
  }
  HeatmapRequest r{};
  if (rs_sweep_policy_parse(spec.substr(0, first).c_str(), &r.policy) != RS_OK ||
      rs_sweep_metric_parse(spec.substr(first + 1, second - first - 1).c_str(), &r.metric) !=
          RS_OK) {
    throw CLI::ValidationError("--heatmap", rs_last_error());
  }
  r.path = spec.substr(second + 1);
  return r;
}

void run_sweep(const SweepArgs& a, const std::vector<HeatmapRequest>& heatmaps,
               const std::vector<rs_sweep_policy>& policies) {
  rs_sweep_spec spec;
  rs_sweep_spec_default(&spec);
  spec.trans_values = a.trans.data();
  spec.trans_count = a.trans.size();
  spec.obs_values = a.obs.data();
  spec.obs_count = a.obs.size();
  spec.reward_values = a.rewards.data();
  spec.reward_count = a.rewards.size();
  spec.policies = policies.data();
  spec.policy_count = policies.size();
  spec.episodes = a.episodes;
  spec.solver = a.solver.config;
  spec.solver.seed = a.solver_seed;
  spec.n = a.n;
  spec.base_seed = a.seed;
  spec.reward_oob = a.r1;
  spec.discount = a.gamma;
  spec.cap = a.cap;
  spec.cache_dir = a.cache_dir.empty() ? nullptr : a.cache_dir.c_str();
  spec.record_timing = a.timing ? 1 : 0;

  // The digest of every grid cell, in sweep order.
  for (double r : a.rewards) {
    for (double t : a.trans) {
      for (double o : a.obs) {
        const rs_params p{a.n, t, o, r, a.r1, a.gamma};
        std::printf("cell trans=%.6g obs=%.6g reward=%.6g digest %s\n", t, o, r,
                    digest_of(p).c_str());
      }
    }
  }
  SweepHandle sweep;
  check(rs_sweep_run(&spec, &sweep.ptr), "sweep");
  const std::size_t rows = rs_sweep_size(sweep.ptr);
  for (std::size_t i = 0; i < rows; ++i) {
    rs_sweep_record rec;
    check(rs_sweep_get(sweep.ptr, i, &rec));
    if (rec.error != nullptr) {
      std::fprintf(stderr, "cell trans=%.6g obs=%.6g reward=%.6g %s: %s\n", rec.trans, rec.obs,
                   rec.reward, rs_sweep_policy_name(rec.policy), rec.error);
    }
  }
  check(rs_sweep_write_csv(sweep.ptr, a.out.c_str()), a.out);
  std::printf("wrote %s (%zu rows)\n", a.out.c_str(), rows);
  for (const HeatmapRequest& h : heatmaps) {
    check(rs_sweep_write_heatmap(sweep.ptr, h.policy, h.metric, h.path.c_str()), h.path);
    std::printf("wrote %s\n", h.path.c_str());
  }
}

// ---- fly -------------------------------------------------------------------

struct FlyArgs {
  std::string policy;
  std::string link;
  int poll_ms = 200;
  int idle_timeout_ms = 0;
  std::string log = "-";
  std::string dump_belief;
};

void run_fly(const FlyArgs& a) {
  PolicyHandle pol;
  const rs_policy_info info = load(a.policy, pol);
  print_params(info.params, info.digest);
  std::fflush(stdout);
  rs_fly_options opts;
  rs_fly_options_default(&opts);
  opts.poll_interval_ms = a.poll_ms;
  opts.idle_timeout_ms = a.idle_timeout_ms;
  opts.log_path = a.log == "none" ? nullptr : a.log.c_str();
  opts.dump_belief_path = a.dump_belief.empty() ? nullptr : a.dump_belief.c_str();
  check(rs_fly(pol.ptr, a.link.c_str(), &opts), "fly");
}

// ---- inspect ---------------------------------------------------------------

struct InspectArgs {
  ModelFlags model;
  std::string policy;
};

void run_inspect(const InspectArgs& a) {
  if (a.policy.empty()) {
    print_params(a.model.params, digest_of(a.model.params));
    return;
  }
  PolicyHandle pol;
  const rs_policy_info info = load(a.policy, pol);
  print_params(info.params, info.digest);
  std::printf("kind %s\nalphas %zu\n", rs_policy_kind_name(info.kind), info.alphas);
  for (int z = 1; z <= info.params.n; ++z) {
    std::size_t count = 0;
    check(rs_policy_slice_size(pol.ptr, z, &count));
    std::printf("slice z=%d alphas %zu\n", z, count);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relative-state POMDP planner for UAV target search"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rs_version());

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "solve a policy and write it to a file");
  solve.model.attach(solve_cmd);
  solve.solver.attach(solve_cmd);
  solve_cmd->add_option("--kind", solve.kind, "solver")
      ->check(CLI::IsMember({"pbvi", "qmdp", "mdp"}))
      ->capture_default_str();
  solve_cmd->add_option("--seed", solve.seed, "belief sampling seed")->capture_default_str();
  solve_cmd->add_option("--out", solve.out, "policy file")->required();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Monte Carlo evaluation of a policy or baseline");
  eval.model.attach(eval_cmd);
  auto* policy_opt = eval_cmd->add_option("--policy", eval.policy, "policy file");
  auto* baseline_opt = eval_cmd->add_option("--baseline", eval.baseline, "baseline controller")
                           ->check(CLI::IsMember({"heuristic", "random"}));
  policy_opt->excludes(baseline_opt);
  eval_cmd->add_option("--episodes", eval.episodes)->check(CLI::PositiveNumber)->capture_default_str();
  eval_cmd->add_option("--seed", eval.seed, "base seed; episode i uses seed + i")->capture_default_str();
  eval_cmd->add_option("--cap", eval.cap, "step cap per episode")->check(CLI::PositiveNumber)->capture_default_str();
  eval_cmd->add_option("--csv", eval.csv, "also write the summary as CSV");
  auto* trace_opt = eval_cmd->add_option("--trace", eval.trace, "write the trace of the first episode");
  eval_cmd->add_flag("--dump-belief", eval.dump_belief, "include beliefs in the trace")->needs(trace_opt);

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "grid sweep over transition and observation noise");
  sweep.solver.attach(sweep_cmd);
  sweep_cmd->add_option("--trans", sweep.trans)->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--obs", sweep.obs)->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--rewards", sweep.rewards)->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--policies", sweep.policies)
      ->delimiter(',')
      ->check(CLI::IsMember({"pomdp", "heuristic", "random"}))
      ->capture_default_str();
  sweep_cmd->add_option("--episodes", sweep.episodes)->check(CLI::PositiveNumber)->capture_default_str();
  sweep_cmd->add_option("--n", sweep.n)->capture_default_str();
  sweep_cmd->add_option("--r1", sweep.r1)->capture_default_str();
  sweep_cmd->add_option("--gamma", sweep.gamma)->capture_default_str();
  sweep_cmd->add_option("--cap", sweep.cap)->check(CLI::PositiveNumber)->capture_default_str();
  sweep_cmd->add_option("--seed", sweep.seed, "evaluation base seed")->capture_default_str();
  sweep_cmd->add_option("--solver-seed", sweep.solver_seed)->capture_default_str();
  sweep_cmd->add_option("--cache-dir", sweep.cache_dir, "reuse solved policies from this directory");
  sweep_cmd->add_flag("--timing", sweep.timing, "record wall-clock solve times in the CSV");
  sweep_cmd->add_option("--out", sweep.out, "CSV output")->required();
  sweep_cmd->add_option("--heatmap", sweep.heatmaps, "policy:metric:path, repeatable");

  FlyArgs fly;
  auto* fly_cmd = app.add_subcommand("fly", "serve a policy over the link-file protocol");
  fly_cmd->add_option("--policy", fly.policy)->required();
  fly_cmd->add_option("--link", fly.link)->required();
  fly_cmd->add_option("--poll-ms", fly.poll_ms)->check(CLI::NonNegativeNumber)->capture_default_str();
  fly_cmd->add_option("--idle-timeout-ms", fly.idle_timeout_ms, "0 waits forever")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  fly_cmd->add_option("--log", fly.log, "exchange log file, '-' for stderr, none to disable")
      ->capture_default_str();
  fly_cmd->add_option("--dump-belief", fly.dump_belief, "rewrite the current belief here after each step");

  InspectArgs inspect;
  auto* inspect_cmd = app.add_subcommand("inspect", "show a policy file or a parameter digest");
  inspect.model.attach(inspect_cmd);
  inspect_cmd->add_option("--policy", inspect.policy);

  std::vector<HeatmapRequest> heatmaps;
  std::vector<rs_sweep_policy> sweep_policies;
  try {
    app.parse(argc, argv);
    if (eval_cmd->parsed() && eval.policy.empty() && eval.baseline.empty()) {
      throw CLI::RequiredError("eval needs --policy or --baseline");
    }
    for (const std::string& h : sweep.heatmaps) heatmaps.push_back(parse_heatmap(h));
    for (const std::string& p : sweep.policies) {
      rs_sweep_policy sp;
      rs_sweep_policy_parse(p.c_str(), &sp);
      sweep_policies.push_back(sp);
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    if (solve_cmd->parsed()) run_solve(solve);
    if (eval_cmd->parsed()) run_eval(eval);
    if (sweep_cmd->parsed()) run_sweep(sweep, heatmaps, sweep_policies);
    if (fly_cmd->parsed()) run_fly(fly);
    if (inspect_cmd->parsed()) run_inspect(inspect);
  } catch (const Failure& f) {
    std::fflush(stdout);
    std::fprintf(stderr, "error: %s\n", f.message.c_str());
    return kExitRuntime;
  }
  return 0;
}
