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

#ifndef RELSEARCH_MODEL_HPP_
#define RELSEARCH_MODEL_HPP_

// The reduced target-search POMDP. States store the drone position relative
// to the target, so the model has (2N-1)^2 * N states instead of the N^5 a
// joint drone/target encoding would need. Altitude is observed exactly.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace relsearch {

struct ModelParams {
  int n = 7;                   // grid side; the world is n x n x n
  double trans_prob = 0.88;    // chance a motion executes as commanded
  double obs_base = 0.88;      // base observation accuracy
  double reward_target = 10.0;
  double reward_oob = -1.0;
  double discount = 0.95;

  bool operator==(const ModelParams&) const = default;
};

// Throws DomainError on the first violated invariant.
void validate(const ModelParams& p);

// 16 hex digits; FNV-1a over the canonical text form of the params.
std::string params_digest(const ModelParams& p);

// Canonical "n=7 trans=0.88 ..." form shared by the digest and the policy
// file header. Floats use the shortest round-trip representation.
std::string params_to_string(const ModelParams& p);

// Shortest decimal that parses back to exactly `v`.
std::string format_double(double v);

struct RelState {
  int x_rel = 1;  // x_d - x_r + n, in [1, 2n-1]
  int y_rel = 1;  // y_d - y_r + n, in [1, 2n-1]
  int z = 1;      // altitude, in [1, n]

  bool operator==(const RelState&) const = default;
};

struct AbsPosition {
  int x = 1;
  int y = 1;
  int z = 1;
};

enum class Action : std::uint8_t {
  east,
  west,
  north,
  south,
  ascend,
  descend,
  look,
};

inline constexpr int kNumActions = 7;
inline constexpr std::array<Action, kNumActions> kAllActions = {
    Action::east,   Action::west,    Action::north, Action::south,
    Action::ascend, Action::descend, Action::look};
inline constexpr std::array<Action, 6> kMotions = {
    Action::east,   Action::west,    Action::north,
    Action::south,  Action::ascend,  Action::descend};

constexpr int index_of(Action a) noexcept { return static_cast<int>(a); }
constexpr bool is_motion(Action a) noexcept { return a != Action::look; }

struct Offset {
  int dx = 0;
  int dy = 0;
  int dz = 0;
};

// North is +y, west is +x, ascend is +z.
constexpr Offset displacement(Action a) noexcept {
  switch (a) {
    case Action::east: return {-1, 0, 0};
    case Action::west: return {1, 0, 0};
    case Action::north: return {0, 1, 0};
    case Action::south: return {0, -1, 0};
    case Action::ascend: return {0, 0, 1};
    case Action::descend: return {0, 0, -1};
    case Action::look: break;
  }
  return {};
}

std::string_view to_string(Action a);
std::optional<Action> parse_action(std::string_view token);

enum class ObsSymbol : std::uint8_t { seen, not_seen, none };

std::string_view to_string(ObsSymbol o);
std::optional<ObsSymbol> parse_obs(std::string_view token);

struct Outcome {
  RelState state;
  double prob = 0.0;
  bool bumped = false;
};

// At most six outcomes, in canonical direction order of the first direction
// that produced each; zero-probability outcomes are dropped.
using TransitionDist = std::vector<Outcome>;

// -- Free functions over the raw params -------------------------------------

RelState rel_from_absolute(const AbsPosition& drone, const AbsPosition& target,
                           int n);

inline constexpr int side_length(int n) noexcept { return 2 * n - 1; }
inline constexpr int num_cells(int n) noexcept {
  return side_length(n) * side_length(n);
}
inline constexpr int num_states(int n) noexcept { return num_cells(n) * n; }

bool in_bounds(const RelState& s, int n) noexcept;
inline constexpr RelState target_state(int n) noexcept { return {n, n, 1}; }
inline constexpr bool is_target(const RelState& s, int n) noexcept {
  return s.x_rel == n && s.y_rel == n && s.z == 1;
}

// Row-major, z outermost, then y_rel, then x_rel.
int state_index(const RelState& s, int n);
RelState state_unindex(int index, int n);

// Index of the (x_rel, y_rel) cell inside one altitude slice.
inline constexpr int cell_index(int x_rel, int y_rel, int n) noexcept {
  return (y_rel - 1) * side_length(n) + (x_rel - 1);
}

double obs_accuracy(int z, double obs_base);

// Whether the target lies in the (2z-1) x (2z-1) footprint below the drone.
bool fov_contains(const RelState& s, int n) noexcept;

double obs_likelihood(const RelState& s, Action a, ObsSymbol o,
                      const ModelParams& p);

// Throws DomainError for the terminal state.
TransitionDist transition_dist(const RelState& s, Action a,
                               const ModelParams& p);

double reward(const RelState& s, Action a, const Outcome& outcome,
              const ModelParams& p);

// -- Precomputed model -------------------------------------------------------

// Immutable tables built once from validated params. The target state is
// absorbing here (self-loop, zero reward) so solvers and filters can push
// mass through it; the free transition_dist() still rejects it.
class Model {
 public:
  explicit Model(const ModelParams& params);

  const ModelParams& params() const noexcept { return params_; }
  const std::string& digest() const noexcept { return digest_; }
  int n() const noexcept { return params_.n; }
  int side() const noexcept { return side_length(params_.n); }
  int cells() const noexcept { return num_cells(params_.n); }
  int states() const noexcept { return num_states(params_.n); }
  int target_cell() const noexcept { return cell_index(n(), n(), n()); }

  // Outcomes for state index `s`; absorbing at the target.
  const TransitionDist& transitions(int s, Action a) const {
    return transitions_[static_cast<std::size_t>(s) * kNumActions + index_of(a)];
  }
  const TransitionDist& transitions(const RelState& s, Action a) const {
    return transitions(state_index(s, n()), a);
  }

  // Expected immediate reward of `a` in state index `s`.
  double expected_reward(int s, Action a) const {
    return expected_reward_[static_cast<std::size_t>(s) * kNumActions +
                            index_of(a)];
  }

  double accuracy(int z) const { return accuracy_[static_cast<std::size_t>(z)]; }

  // Per-slice footprint mask: fov(z)[cell] == true iff the cell is visible.
  const std::vector<bool>& fov(int z) const {
    return fov_[static_cast<std::size_t>(z)];
  }

  // Likelihood of `o` after a look with the drone in `cell` at altitude z.
  double look_likelihood(int z, int cell, ObsSymbol o) const {
    if (o == ObsSymbol::none) return 0.0;
    const bool seen = fov(z)[static_cast<std::size_t>(cell)];
    return (o == ObsSymbol::seen) == seen ? accuracy(z) : 1.0 - accuracy(z);
  }

 private:
  ModelParams params_;
  std::string digest_;
  std::vector<TransitionDist> transitions_;
  std::vector<double> expected_reward_;
  std::vector<double> accuracy_;
  std::vector<std::vector<bool>> fov_;
};

}  // namespace relsearch

#endif  // RELSEARCH_MODEL_HPP_
