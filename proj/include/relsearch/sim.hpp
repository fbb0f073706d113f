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

#ifndef RELSEARCH_SIM_HPP_
#define RELSEARCH_SIM_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "relsearch/belief.hpp"
#include "relsearch/model.hpp"
#include "relsearch/random.hpp"
#include "relsearch/solver.hpp"

namespace relsearch {

struct EnvState {
  RelState rel;
  bool bumped = false;  // last action tried to leave the relative grid
  bool done = false;    // target reached
  int t = 0;

  bool operator==(const EnvState&) const = default;
};

// Uniform over every non-target relative state. Throws DomainError for n = 1,
// where the target is the only state.
EnvState sample_start(int n, Rng& rng);

struct StepResult {
  EnvState next;
  ObsSymbol obs = ObsSymbol::none;
  double reward = 0.0;
};

StepResult step_env(const Model& model, const EnvState& e, Action a, Rng& rng);

enum class Baseline : std::uint8_t { heuristic, random };

std::string_view to_string(Baseline b);

// What drives an episode: a solved policy or one of the baselines.
using Agent = std::variant<std::reference_wrapper<const Policy>, Baseline>;

inline constexpr int kDefaultStepCap = 500;

struct TraceStep {
  EnvState state;  // after the step
  Action action = Action::look;
  ObsSymbol obs = ObsSymbol::none;
  double reward = 0.0;
  Belief belief;  // after the update

  bool operator==(const TraceStep&) const = default;
};

struct EpisodeResult {
  int steps = 0;
  double discounted_reward = 0.0;
  bool found = false;
  bool failed = false;  // belief degenerated; `error` says why
  std::string error;
  std::array<int, kNumActions> action_counts{};
  EnvState start;
  std::vector<TraceStep> trace;  // filled when requested

  bool operator==(const EpisodeResult&) const = default;
};

struct EpisodeOptions {
  int cap = kDefaultStepCap;
  bool record_trace = false;
};

EpisodeResult run_episode(const Agent& agent, const Model& model,
                          std::uint64_t seed, const EpisodeOptions& opts = {});

struct EvalSummary {
  int episodes = 0;
  double mean_reward = 0.0;
  double mean_steps = 0.0;
  double ci95_steps = 0.0;  // half-width, normal approximation
  double look_proportion = 0.0;
  double found_rate = 0.0;
  int failures = 0;
  std::array<long, kNumActions> action_counts{};

  bool operator==(const EvalSummary&) const = default;
};

// Episode i uses seed base_seed + i.
EvalSummary evaluate(const Agent& agent, const Model& model, int episodes,
                     std::uint64_t base_seed, int cap = kDefaultStepCap);

// Aggregation used by evaluate(); exposed for callers that run episodes
// themselves.
EvalSummary summarize(const std::vector<EpisodeResult>& results);

// Trace text: a `start z x_rel y_rel` header, then one
// `t z x_rel y_rel action obs reward` line per step. With beliefs enabled each
// step line is followed by a `belief` ... `end` block in write_belief format.
void write_trace(std::ostream& os, const EpisodeResult& ep, bool with_beliefs);

}  // namespace relsearch

#endif  // RELSEARCH_SIM_HPP_
