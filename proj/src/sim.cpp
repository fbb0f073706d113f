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

#include "relsearch/sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "relsearch/baselines.hpp"
#include "relsearch/error.hpp"

namespace relsearch {

namespace {

// Controller-side state for one episode.
class Driver {
 public:
  Driver(const Agent& agent, const Model& model, std::uint64_t seed)
      : agent_(agent), model_(model) {
    if (const auto* b = std::get_if<Baseline>(&agent_)) {
      if (*b == Baseline::heuristic) heuristic_ = make_heuristic(model.n());
      random_.seed = mix_seed(seed ^ 0x5eedc0ffee123457ULL);
    }
  }

  bool uses_belief() const {
    return std::holds_alternative<std::reference_wrapper<const Policy>>(agent_) &&
           policy().kind != PolicyKind::mdp;
  }

  Action choose(const EnvState& env, const Belief* belief) {
    if (const auto* b = std::get_if<Baseline>(&agent_)) {
      if (*b == Baseline::heuristic) {
        auto [a, next] = heuristic_next(heuristic_, last_obs_, env.rel.z);
        heuristic_ = next;
        return a;
      }
      auto [a, next] = random_next(random_, env.rel.z);
      random_ = next;
      return a;
    }
    if (policy().kind == PolicyKind::mdp) {
      return policy_action(policy(), model_, delta_belief(model_.n(), env.rel));
    }
    return policy_action(policy(), model_, *belief);
  }

  void observe(ObsSymbol o) { last_obs_ = o; }

 private:
  const Policy& policy() const {
    return std::get<std::reference_wrapper<const Policy>>(agent_).get();
  }

  const Agent& agent_;
  const Model& model_;
  HeuristicCtl heuristic_;
  RandomCtl random_;
  ObsSymbol last_obs_ = ObsSymbol::none;
};

}  // namespace

EnvState sample_start(int n, Rng& rng) {
  if (n < 2) throw DomainError("sample_start: n=1 has no non-target state");
  const int target = state_index(target_state(n), n);
  int idx = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(num_states(n) - 1)));
  if (idx >= target) ++idx;
  return EnvState{state_unindex(idx, n), false, false, 0};
}

StepResult step_env(const Model& model, const EnvState& e, Action a, Rng& rng) {
  if (e.done) throw DomainError("step_env: episode already finished");
  const TransitionDist& dist = model.transitions(e.rel, a);
  double u = uniform01(rng);
  const Outcome* picked = &dist.back();
  for (const Outcome& o : dist) {
    if (u < o.prob) {
      picked = &o;
      break;
    }
    u -= o.prob;
  }
  StepResult r;
  r.next.rel = picked->state;
  r.next.bumped = picked->bumped;
  r.next.done = is_target(picked->state, model.n());
  r.next.t = e.t + 1;
  r.reward = reward(e.rel, a, *picked, model.params());
  if (a == Action::look) {
    const int c = cell_index(r.next.rel.x_rel, r.next.rel.y_rel, model.n());
    r.obs = uniform01(rng) < model.look_likelihood(r.next.rel.z, c, ObsSymbol::seen)
                ? ObsSymbol::seen
                : ObsSymbol::not_seen;
  }
  return r;
}

std::string_view to_string(Baseline b) {
  return b == Baseline::heuristic ? "heuristic" : "random";
}

EpisodeResult run_episode(const Agent& agent, const Model& model, std::uint64_t seed,
                          const EpisodeOptions& opts) {
  if (opts.cap < 1) throw DomainError("run_episode: cap must be >= 1");
  if (const auto* p = std::get_if<std::reference_wrapper<const Policy>>(&agent)) {
    check_digest(p->get(), model);
  }
  Rng rng = make_rng(seed);
  EpisodeResult result;
  EnvState env = sample_start(model.n(), rng);
  result.start = env;
  Driver driver(agent, model, seed);
  const bool track = driver.uses_belief() || opts.record_trace;
  Belief belief = track ? uniform_init(model.n(), env.rel.z) : Belief{};
  const double gamma = model.params().discount;
  double discount = 1.0;
  while (!env.done && result.steps < opts.cap) {
    const Action a = driver.choose(env, &belief);
    const StepResult step = step_env(model, env, a, rng);
    result.discounted_reward += discount * step.reward;
    discount *= gamma;
    ++result.steps;
    ++result.action_counts[static_cast<std::size_t>(index_of(a))];
    env = step.next;
    driver.observe(step.obs);
    if (track && !env.done) {
      try {
        belief = update(model, belief, a, step.obs, env.rel.z);
      } catch (const FilterDegenerateError& e) {
        result.failed = true;
        result.error = e.what();
        break;
      }
    }
    if (opts.record_trace) {
      result.trace.push_back({env, a, step.obs, step.reward, env.done ? Belief{} : belief});
    }
  }
  result.found = env.done;
  return result;
}

EvalSummary summarize(const std::vector<EpisodeResult>& results) {
  EvalSummary s;
  s.episodes = static_cast<int>(results.size());
  if (results.empty()) return s;
  double reward_sum = 0.0;
  double steps_sum = 0.0;
  double steps_sq = 0.0;
  long total_steps = 0;
  int found = 0;
  for (const EpisodeResult& r : results) {
    reward_sum += r.discounted_reward;
    steps_sum += r.steps;
    steps_sq += static_cast<double>(r.steps) * r.steps;
    total_steps += r.steps;
    found += r.found ? 1 : 0;
    s.failures += r.failed ? 1 : 0;
    for (int a = 0; a < kNumActions; ++a) {
      s.action_counts[static_cast<std::size_t>(a)] += r.action_counts[static_cast<std::size_t>(a)];
    }
  }
  const double n = static_cast<double>(results.size());
  s.mean_reward = reward_sum / n;
  s.mean_steps = steps_sum / n;
  if (results.size() > 1) {
    const double var = std::max(0.0, (steps_sq - n * s.mean_steps * s.mean_steps) / (n - 1.0));
    s.ci95_steps = 1.96 * std::sqrt(var / n);
  }
  s.look_proportion =
      total_steps > 0
          ? static_cast<double>(s.action_counts[static_cast<std::size_t>(index_of(Action::look))]) /
                static_cast<double>(total_steps)
          : 0.0;
  s.found_rate = found / n;
  return s;
}

EvalSummary evaluate(const Agent& agent, const Model& model, int episodes,
                     std::uint64_t base_seed, int cap) {
  if (episodes < 1) throw DomainError("evaluate: episodes must be >= 1");
  std::vector<EpisodeResult> results;
  results.reserve(static_cast<std::size_t>(episodes));
  const EpisodeOptions opts{cap, false};
  for (int i = 0; i < episodes; ++i) {
    results.push_back(run_episode(agent, model, base_seed + static_cast<std::uint64_t>(i), opts));
  }
  return summarize(results);
}

void write_trace(std::ostream& os, const EpisodeResult& ep, bool with_beliefs) {
  os << "start " << ep.start.rel.z << ' ' << ep.start.rel.x_rel << ' ' << ep.start.rel.y_rel
     << '\n';
  for (const TraceStep& s : ep.trace) {
    os << s.state.t << ' ' << s.state.rel.z << ' ' << s.state.rel.x_rel << ' '
       << s.state.rel.y_rel << ' ' << to_string(s.action) << ' ' << to_string(s.obs) << ' '
       << format_double(s.reward) << '\n';
    if (with_beliefs && !s.belief.probs.empty()) {
      os << "belief\n";
      write_belief(os, s.belief);
      os << "end\n";
    }
  }
}

}  // namespace relsearch
