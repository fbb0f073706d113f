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


// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracle_filter.hpp"
#include "relsearch/error.hpp"
#include "relsearch/flight.hpp"
#include "relsearch/sim.hpp"
#include "relsearch/sweep.hpp"

using namespace relsearch;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kEpisodes = 1000;
constexpr std::uint64_t kEvalSeed = 1;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ModelParams params(int n, double trans, double obs) {
  ModelParams p;
  p.n = n;
  p.trans_prob = trans;
  p.obs_base = obs;
  return p;
}

// Solver settings shared by every n = 7 solve below.
SolverConfig n7_config() {
  SolverConfig cfg;
  cfg.max_points = 5000;
  cfg.time_budget = std::chrono::minutes(15);
  cfg.seed = 0;
  return cfg;
}

struct Solved {
  Policy policy;
  SolveStats stats;
};

// Solves are shared between criteria.
const Solved& n7_policy(double trans, double obs) {
  static std::map<std::pair<double, double>, Solved> cache;
  const auto key = std::make_pair(trans, obs);
  auto it = cache.find(key);
  if (it == cache.end()) {
    Solved s;
    s.policy = solve_pbvi(Model(params(7, trans, obs)), n7_config(), &s.stats);
    std::printf("  solved n=7 trans=%g obs=%g: %d points, %d sweeps, %zu vectors, %.1f s%s\n",
                trans, obs, s.stats.points, s.stats.sweeps, s.stats.alphas, s.stats.seconds,
                s.stats.converged ? "" : " (budget reached)");
    std::fflush(stdout);
    it = cache.emplace(key, std::move(s)).first;
  }
  return it->second;
}

std::string stats_text(const EvalSummary& s) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.2f +/- %.2f steps, look %.3f, found %.3f", s.mean_steps,
                s.ci95_steps, s.look_proportion, s.found_rate);
  return buf;
}

bool ci_below(const EvalSummary& a, const EvalSummary& b) {
  return a.mean_steps + a.ci95_steps < b.mean_steps - b.ci95_steps;
}

struct Result {
  bool pass = false;
  std::string detail;
};

Result model_normalization() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  bool exact = true;
  for (int n : {2, 3, 5, 7}) {
    const ModelParams p = params(n, 0.88, 0.88);
    const Model m(p);
    for (int s = 0; s < m.states(); ++s) {
      for (Action a : kAllActions) {
        double total = 0.0;
        for (const Outcome& o : m.transitions(s, a)) total += o.prob;
        worst = std::max(worst, std::abs(total - 1.0));
      }
      const RelState rs = state_unindex(s, n);
      const double seen = obs_likelihood(rs, Action::look, ObsSymbol::seen, p);
      const double miss = obs_likelihood(rs, Action::look, ObsSymbol::not_seen, p);
      exact = exact && seen + miss == 1.0;
      const int c = cell_index(rs.x_rel, rs.y_rel, n);
      exact = exact && m.look_likelihood(rs.z, c, ObsSymbol::seen) +
                               m.look_likelihood(rs.z, c, ObsSymbol::not_seen) ==
                           1.0;
    }
  }
  const double secs = since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "max |sum T - 1| = %.3g (<= 1e-12), look pairs exact: %s, %.3f s (< 1 s)", worst,
                exact ? "yes" : "no", secs);
  return {worst <= 1e-12 && exact && secs < 1.0, buf};
}

Result filter_soundness() {
  const auto t0 = Clock::now();
  const int n = 3;
  const double trans = 0.88, obs = 0.88;
  const Model m(params(n, trans, obs));
  Rng rng = make_rng(77);
  double worst = 0.0;
  for (int seq = 0; seq < 100; ++seq) {
    const int z0 = 1 + static_cast<int>(uniform_below(rng, n));
    oracle::JointFilter joint(n, trans, obs, z0);
    oracle::Joint truth{};
    do {
      truth.tx = 1 + static_cast<int>(uniform_below(rng, n));
      truth.ty = 1 + static_cast<int>(uniform_below(rng, n));
      truth.dx = truth.tx - (n - 1) + static_cast<int>(uniform_below(rng, 2 * n - 1));
      truth.dy = truth.ty - (n - 1) + static_cast<int>(uniform_below(rng, 2 * n - 1));
      truth.dz = z0;
    } while (joint.is_target(truth));
    Belief b = uniform_init(n, z0);
    for (int t = 0; t < 50; ++t) {
      const int a = static_cast<int>(uniform_below(rng, kNumActions));
      truth = joint.sample_next(truth, a, uniform01(rng));
      const int o = joint.sample_obs(truth, a, uniform01(rng));
      joint.update(a, o, truth.dz);
      b = update(m, b, static_cast<Action>(a), static_cast<ObsSymbol>(o), truth.dz);
      const std::vector<double> ref = joint.relative_marginal();
      for (std::size_t c = 0; c < ref.size(); ++c) {
        worst = std::max(worst, std::abs(ref[c] - b.probs[c]));
      }
    }
  }
  const double secs = since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "L-inf vs joint filter = %.3g (<= 1e-9), %.2f s (< 10 s)",
                worst, secs);
  return {worst <= 1e-9 && secs < 10.0, buf};
}

Result deterministic_optimality() {
  const auto t0 = Clock::now();
  const int n = 5;
  const Model m(params(n, 1.0, 1.0));
  const ValueTable vt = mdp_value_iteration(m, 1e-12);
  int exact_paths = 0, total = 0;
  double worst = 0.0;
  for (int i = 0; i < m.states(); ++i) {
    RelState s = state_unindex(i, n);
    if (is_target(s, n)) continue;
    ++total;
    const int d = std::abs(s.x_rel - n) + std::abs(s.y_rel - n) + (s.z - 1);
    worst = std::max(worst, std::abs(vt.values[static_cast<std::size_t>(i)] -
                                     10.0 * std::pow(0.95, d - 1)));
    int steps = 0;
    while (!is_target(s, n) && steps <= 4 * n) {
      const Action a = vt.greedy[static_cast<std::size_t>(state_index(s, n))];
      s = m.transitions(s, a).front().state;
      ++steps;
    }
    exact_paths += is_target(s, n) && steps == d ? 1 : 0;
  }
  const double secs = since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%d/%d starts in exactly d steps, max |V - 10*0.95^(d-1)| = %.3g (<= 1e-9), "
                "%.2f s (< 5 s)",
                exact_paths, total, worst, secs);
  return {exact_paths == total && worst <= 1e-9 && secs < 5.0, buf};
}

Belief random_belief(int n, Rng& rng) {
  Belief b{n, 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n))),
           std::vector<double>(static_cast<std::size_t>(num_cells(n)))};
  const bool sparse = uniform01(rng) < 0.3;
  double total = 0.0;
  for (double& p : b.probs) {
    p = (sparse && uniform01(rng) < 0.8) ? 0.0 : -std::log(1.0 - uniform01(rng));
    total += p;
  }
  if (total == 0.0) {
    b.probs[0] = 1.0;
    total = 1.0;
  }
  for (double& p : b.probs) p /= total;
  return b;
}

Result qmdp_dominance() {
  std::string detail;
  bool pass = true;
  double check_secs = 0.0;
  for (int n : {3, 5, 7}) {
    const Model m(params(n, 0.88, 0.88));
    const Policy pbvi = n == 7 ? n7_policy(0.88, 0.88).policy : solve_pbvi(m, SolverConfig{});
    const Policy qmdp = solve_qmdp(m);
    const auto t0 = Clock::now();
    Rng rng = make_rng(1000 + static_cast<std::uint64_t>(n));
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 1000; ++i) {
      const Belief b = random_belief(n, rng);
      worst = std::min(worst, policy_value(qmdp, m, b) - policy_value(pbvi, m, b));
    }
    check_secs += since(t0);
    pass = pass && worst >= -1e-6;
    char buf[96];
    std::snprintf(buf, sizeof buf, "n=%d min(Q - PBVI) = %.3g; ", n, worst);
    detail += buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "(>= -1e-6), check %.2f s (< 60 s)", check_secs);
  return {pass && check_secs < 60.0, detail + buf};
}

Result policy_ordering() {
  const Model m(params(7, 0.88, 0.88));
  const Solved& solved = n7_policy(0.88, 0.88);
  const auto t0 = Clock::now();
  const EvalSummary pomdp = evaluate(std::cref(solved.policy), m, kEpisodes, kEvalSeed);
  const EvalSummary heur = evaluate(Baseline::heuristic, m, kEpisodes, kEvalSeed);
  const EvalSummary rnd = evaluate(Baseline::random, m, kEpisodes, kEvalSeed);
  const double eval_secs = since(t0);
  const bool order = ci_below(pomdp, heur) && ci_below(heur, rnd);
  const bool pomdp_2x = 2.0 * pomdp.mean_steps <= heur.mean_steps;
  const bool heur_12x = 1.2 * heur.mean_steps <= rnd.mean_steps;
  const bool budget = solved.stats.seconds <= 900.0 && eval_secs <= 120.0;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "pomdp %s | heuristic %s | random %s | CI order %s, heuristic/pomdp %.2f "
                "(>= 2), random/heuristic %.2f (>= 1.2), solve %.0f s, eval %.0f s",
                stats_text(pomdp).c_str(), stats_text(heur).c_str(), stats_text(rnd).c_str(),
                order ? "ok" : "violated", heur.mean_steps / pomdp.mean_steps,
                rnd.mean_steps / heur.mean_steps, solved.stats.seconds, eval_secs);
  return {order && pomdp_2x && heur_12x && budget, buf};
}

EvalSummary pomdp_eval(double trans, double obs) {
  const Model m(params(7, trans, obs));
  return evaluate(std::cref(n7_policy(trans, obs).policy), m, kEpisodes, kEvalSeed);
}

Result look_trends() {
  const EvalSummary o100 = pomdp_eval(0.88, 1.0);
  const EvalSummary o076 = pomdp_eval(0.88, 0.76);
  const EvalSummary p076 = pomdp_eval(0.76, 0.88);
  const EvalSummary p100 = pomdp_eval(1.0, 0.88);
  const bool obs_trend = o100.look_proportion - o076.look_proportion >= 0.05;
  const bool trans_trend = p076.look_proportion >= p100.look_proportion;
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "look at obs 1.0 = %.3f vs obs 0.76 = %.3f (diff >= 0.05: %s); look at trans "
                "0.76 = %.3f vs trans 1.0 = %.3f (>=: %s)",
                o100.look_proportion, o076.look_proportion, obs_trend ? "ok" : "no",
                p076.look_proportion, p100.look_proportion, trans_trend ? "ok" : "no");
  return {obs_trend && trans_trend, buf};
}

Result certainty_trend() {
  const Model sure(params(7, 1.0, 1.0));
  const Model noisy(params(7, 0.76, 0.76));
  std::string detail;
  bool pass = true;
  const std::pair<const char*, std::function<Agent(double)>> agents[] = {
      {"pomdp", [](double v) { return Agent{std::cref(n7_policy(v, v).policy)}; }},
      {"heuristic", [](double) { return Agent{Baseline::heuristic}; }},
      {"random", [](double) { return Agent{Baseline::random}; }},
  };
  for (const auto& [name, make] : agents) {
    const EvalSummary a = evaluate(make(1.0), sure, kEpisodes, kEvalSeed);
    const EvalSummary b = evaluate(make(0.76), noisy, kEpisodes, kEvalSeed);
    const bool ok = ci_below(a, b);
    pass = pass && ok;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s %.2f +/- %.2f vs %.2f +/- %.2f %s; ", name, a.mean_steps,
                  a.ci95_steps, b.mean_steps, b.ci95_steps, ok ? "ok" : "NOT below");
    detail += buf;
  }
  return {pass, detail + "(1,1) below (0.76,0.76) with disjoint CIs"};
}

Result random_sanity() {
  const Model m(params(7, 0.88, 0.88));
  const EvalSummary s = evaluate(Baseline::random, m, 10000, kEvalSeed);
  const double lo = 142.05 * 0.7, hi = 142.05 * 1.3;
  char buf[200];
  std::snprintf(buf, sizeof buf, "random mean %.2f +/- %.2f steps over 10000 episodes, found "
                "%.3f; required [%.2f, %.2f]",
                s.mean_steps, s.ci95_steps, s.found_rate, lo, hi);
  return {s.mean_steps >= lo && s.mean_steps <= hi, buf};
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "relsearch_acceptance";
  fs::create_directories(dir);
  return dir;
}

void write_lines(const fs::path& p, const std::vector<std::string>& lines) {
  std::ofstream out(p, std::ios::trunc);
  for (const std::string& l : lines) out << l << '\n';
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Expected error line of a rejected transcript, 0 when accepted.
int rejected_line(const Policy& pol, const fs::path& link) {
  FlyOptions opts;
  opts.poll_interval = std::chrono::milliseconds(1);
  opts.idle_timeout = std::chrono::milliseconds(100);
  try {
    fly(pol, link, opts);
  } catch (const ProtocolError& e) {
    return e.line();
  }
  return 0;
}

Result protocol_round_trip() {
  const Policy& pol = n7_policy(0.88, 0.88).policy;
  const Model m(pol.params);
  // First seed whose episode reaches the target.
  EpisodeResult ep;
  for (std::uint64_t seed = 0;; ++seed) {
    ep = run_episode(std::cref(pol), m, seed, {kDefaultStepCap, true});
    if (ep.found) break;
  }
  // Drone side of the transcript, with the controller's lines interleaved.
  std::vector<std::string> lines{format_link_line(observation_message(ObsSymbol::none,
                                                                      ep.start.rel.z))};
  for (const TraceStep& s : ep.trace) {
    lines.push_back(format_link_line(action_message(s.action)));
    const ObsSymbol o = s.state.done ? ObsSymbol::seen : s.obs;
    lines.push_back(format_link_line(observation_message(o, s.state.rel.z)));
  }
  const fs::path dir = scratch_dir();
  const fs::path link = dir / "round_trip.link";
  write_lines(link, lines);

  const auto t0 = Clock::now();
  FlyOptions opts;
  opts.poll_interval = std::chrono::milliseconds(1);
  opts.idle_timeout = std::chrono::seconds(5);
  int rc = -1;
  std::string error;
  try {
    rc = fly(pol, link, opts);
  } catch (const Error& e) {
    error = e.what();
  }
  const double secs = since(t0);
  const std::vector<std::string> out = read_lines(link);
  bool identical = rc == 0 && out.size() == lines.size() + 1 && out.back() == "A done";
  for (std::size_t i = 0; identical && i < lines.size(); ++i) identical = out[i] == lines[i];

  // Alternation violations: a repeated O line, then an A line in place of
  // the first observation.
  const fs::path bad = dir / "violation.link";
  std::vector<std::string> doubled(lines.begin(), lines.begin() + 3);
  doubled.push_back(lines[2]);
  write_lines(bad, doubled);
  const int line_a = rejected_line(pol, bad);
  write_lines(bad, {lines[1]});
  const int line_b = rejected_line(pol, bad);

  char buf[320];
  std::snprintf(buf, sizeof buf,
                "%zu actions replayed %s%s, %.3f s (< 1 s); doubled O rejected at line %d "
                "(expected 4), leading A rejected at line %d (expected 1)",
                ep.trace.size(), identical ? "identically" : "with differences",
                error.empty() ? "" : (" [" + error + "]").c_str(), secs, line_a, line_b);
  return {identical && secs < 1.0 && line_a == 4 && line_b == 1, buf};
}

std::string policy_bytes(const Policy& p) {
  std::ostringstream os;
  save_policy(p, os);
  return os.str();
}

Result determinism() {
  const Model m(params(5, 0.88, 0.88));
  SolverConfig cfg;
  cfg.max_sweeps = 15;
  cfg.max_points = 800;
  cfg.seed = 11;
  const std::string a = policy_bytes(solve_pbvi(m, cfg));
  const std::string b = policy_bytes(solve_pbvi(m, cfg));
  const bool solve_same = a == b;

  std::istringstream saved(a);
  const Policy pol = load_policy(saved);
  bool eval_same = true;
  for (const Agent& agent : {Agent{std::cref(pol)}, Agent{Baseline::heuristic},
                             Agent{Baseline::random}}) {
    eval_same = eval_same && evaluate(agent, m, 200, 5) == evaluate(agent, m, 200, 5);
  }

  SweepSpec spec;
  spec.n = 3;
  spec.trans_values = {0.88, 1.0};
  spec.obs_values = {0.88, 1.0};
  spec.reward_values = {10.0};
  spec.episodes = 50;
  spec.solver_cfg.max_points = 150;
  spec.solver_cfg.max_sweeps = 10;
  auto csv = [&] {
    std::ostringstream os;
    write_csv(run_sweep(spec), os);
    return os.str();
  };
  const bool sweep_same = csv() == csv();
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "policy files %s (%zu bytes), summaries %s, sweep CSVs %s",
                solve_same ? "identical" : "DIFFER", a.size(), eval_same ? "identical" : "DIFFER",
                sweep_same ? "identical" : "DIFFER");
  return {solve_same && eval_same && sweep_same, buf};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
      {"model normalization", model_normalization},
      {"reduced-state filter soundness", filter_soundness},
      {"deterministic-limit optimality", deterministic_optimality},
      {"QMDP dominance", qmdp_dominance},
      {"policy ordering", policy_ordering},
      {"look-proportion trends", look_trends},
      {"certainty heatmap trend", certainty_trend},
      {"random-policy sanity", random_sanity},
      {"protocol round-trip", protocol_round_trip},
      {"determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = Clock::now();
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failures += r.pass ? 0 : 1;
    std::printf("%s %d %s: %s [%.1f s]\n", r.pass ? "PASS" : "FAIL", id, criteria[i].first,
                r.detail.c_str(), since(t0));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
