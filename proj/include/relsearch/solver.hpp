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

#ifndef RELSEARCH_SOLVER_HPP_
#define RELSEARCH_SOLVER_HPP_

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relsearch/belief.hpp"
#include "relsearch/model.hpp"

namespace relsearch {

// Linear value function over the cells of one altitude slice, tagged with
// the action it recommends.
struct AlphaVector {
  Action action = Action::look;
  int z = 1;
  std::vector<double> weights;

  bool operator==(const AlphaVector&) const = default;
};

enum class PolicyKind : std::uint8_t { pbvi, qmdp, mdp };

std::string_view to_string(PolicyKind k);
std::optional<PolicyKind> parse_policy_kind(std::string_view token);

// Alpha vectors grouped by altitude: slices[z - 1] holds every vector that
// applies while the drone is at altitude z.
//
// An mdp policy carries the same Q-vectors as a qmdp policy; the difference
// is at execution, where the simulator feeds it the true state as a delta
// belief.
struct Policy {
  ModelParams params;
  std::string digest;
  PolicyKind kind = PolicyKind::pbvi;
  std::vector<std::vector<AlphaVector>> slices;

  std::size_t alpha_count() const noexcept;
  bool operator==(const Policy&) const = default;
};

struct SolverConfig {
  std::chrono::duration<double> time_budget{120.0};
  int max_points = 2000;
  double epsilon = 1e-3;
  std::uint64_t seed = 0;
  // Hard cap on backup sweeps; 0 means run until convergence or budget.
  // Fixing this makes results independent of machine speed.
  int max_sweeps = 0;
};

struct ValueTable {
  std::vector<double> values;                     // by state_index
  std::vector<std::array<double, kNumActions>> q;  // by state_index
  std::vector<Action> greedy;                     // by state_index
  int iterations = 0;
};

// Stops once the sup-norm change drops below epsilon * (1 - gamma) / gamma.
// The target state is absorbing with value 0.
ValueTable mdp_value_iteration(const Model& model, double epsilon);

Policy solve_qmdp(const Model& model);
Policy solve_mdp(const Model& model);

struct SolveStats {
  int points = 0;
  int sweeps = 0;
  bool converged = false;
  double seconds = 0.0;
  std::size_t alphas = 0;
  // Mean lower-bound value over the uniform initial beliefs, one entry per
  // completed sweep (entry 0 is the initial bound).
  std::vector<double> initial_value_history;
  // Largest per-point improvement in the final sweep.
  double last_improvement = 0.0;
};

// Point-based backups over beliefs reached by forward simulation. Throws
// SolverError when the time budget runs out before the first sweep ends.
Policy solve_pbvi(const Model& model, const SolverConfig& cfg,
                  SolveStats* stats = nullptr);

// Beliefs the point-based solver backs up, in the order it samples them.
std::vector<Belief> sample_belief_points(const Model& model,
                                         const Policy& guide,
                                         const SolverConfig& cfg);

// Throws DigestMismatchError when `model` is not the one `pol` was solved for.
void check_digest(const Policy& pol, const Model& model);

Action policy_action(const Policy& pol, const Model& model, const Belief& b);
double policy_value(const Policy& pol, const Model& model, const Belief& b);

void save_policy(const Policy& pol, std::ostream& os);
void save_policy(const Policy& pol, const std::filesystem::path& path);
Policy load_policy(std::istream& is);
Policy load_policy(const std::filesystem::path& path);

}  // namespace relsearch

#endif  // RELSEARCH_SOLVER_HPP_
