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

#include "relsearch/model.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstdio>

#include "relsearch/error.hpp"

namespace relsearch {

namespace {

constexpr std::array<std::string_view, kNumActions> kActionNames = {
    "east", "west", "north", "south", "ascend", "descend", "look"};

constexpr std::array<std::string_view, 3> kObsNames = {"seen", "not_seen",
                                                       "none"};

RelState moved(const RelState& s, Action a) {
  const Offset d = displacement(a);
  return {s.x_rel + d.dx, s.y_rel + d.dy, s.z + d.dz};
}

void check_state(const RelState& s, int n) {
  if (!in_bounds(s, n)) {
    throw DomainError("relative state (" + std::to_string(s.x_rel) + "," +
                      std::to_string(s.y_rel) + "," + std::to_string(s.z) +
                      ") outside bounds for n=" + std::to_string(n));
  }
}

// Outcome list shared by the public transition_dist() and the cached tables.
TransitionDist build_transitions(const RelState& s, Action a,
                                 const ModelParams& p) {
  TransitionDist out;
  if (a == Action::look) {
    out.push_back({s, 1.0, false});
    return out;
  }
  const double stray = (1.0 - p.trans_prob) / 5.0;
  int stay = -1;
  for (Action d : kMotions) {
    const double prob = d == a ? p.trans_prob : stray;
    if (prob <= 0.0) continue;
    const RelState next = moved(s, d);
    if (in_bounds(next, p.n)) {
      out.push_back({next, prob, false});
    } else if (stay < 0) {
      stay = static_cast<int>(out.size());
      out.push_back({s, prob, true});
    } else {
      out[static_cast<std::size_t>(stay)].prob += prob;
    }
  }
  return out;
}

}  // namespace

void validate(const ModelParams& p) {
  if (p.n < 1) throw DomainError("n must be >= 1");
  if (!(p.trans_prob >= 0.0 && p.trans_prob <= 1.0)) {
    throw DomainError("trans_prob must lie in [0, 1]");
  }
  if (!(p.obs_base > 0.5 && p.obs_base <= 1.0)) {
    throw DomainError("obs_base must lie in (0.5, 1]");
  }
  if (!(p.discount > 0.0 && p.discount < 1.0)) {
    throw DomainError("discount must lie in (0, 1)");
  }
  if (!(p.reward_target > 0.0)) throw DomainError("reward_target must be > 0");
  if (!(p.reward_oob < 0.0)) throw DomainError("reward_oob must be < 0");
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw Error("cannot format double");
  return std::string(buf.data(), end);
}

std::string params_to_string(const ModelParams& p) {
  return "n=" + std::to_string(p.n) + " trans=" + format_double(p.trans_prob) +
         " obs=" + format_double(p.obs_base) +
         " r0=" + format_double(p.reward_target) +
         " r1=" + format_double(p.reward_oob) +
         " gamma=" + format_double(p.discount);
}

std::string params_digest(const ModelParams& p) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : params_to_string(p)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string_view to_string(Action a) {
  return kActionNames[static_cast<std::size_t>(index_of(a))];
}

std::optional<Action> parse_action(std::string_view token) {
  for (Action a : kAllActions) {
    if (to_string(a) == token) return a;
  }
  return std::nullopt;
}

std::string_view to_string(ObsSymbol o) {
  return kObsNames[static_cast<std::size_t>(o)];
}

std::optional<ObsSymbol> parse_obs(std::string_view token) {
  for (std::size_t i = 0; i < kObsNames.size(); ++i) {
    if (kObsNames[i] == token) return static_cast<ObsSymbol>(i);
  }
  return std::nullopt;
}

RelState rel_from_absolute(const AbsPosition& drone, const AbsPosition& target,
                           int n) {
  auto inside = [n](const AbsPosition& q) {
    return q.x >= 1 && q.x <= n && q.y >= 1 && q.y <= n && q.z >= 1 &&
           q.z <= n;
  };
  if (n < 1 || !inside(drone) || !inside(target)) {
    throw DomainError("absolute position outside [1, n]^3");
  }
  if (target.z != 1) throw DomainError("target must lie on level 1");
  return {drone.x - target.x + n, drone.y - target.y + n, drone.z};
}

bool in_bounds(const RelState& s, int n) noexcept {
  const int side = side_length(n);
  return s.x_rel >= 1 && s.x_rel <= side && s.y_rel >= 1 && s.y_rel <= side &&
         s.z >= 1 && s.z <= n;
}

int state_index(const RelState& s, int n) {
  if (!in_bounds(s, n)) throw DomainError("state_index: state out of bounds");
  const int side = side_length(n);
  return ((s.z - 1) * side + (s.y_rel - 1)) * side + (s.x_rel - 1);
}

RelState state_unindex(int index, int n) {
  if (index < 0 || index >= num_states(n)) throw DomainError("state_unindex: index out of range");
  const int side = side_length(n);
  const int x = index % side;
  const int y = (index / side) % side;
  const int z = index / (side * side);
  return {x + 1, y + 1, z + 1};
}

double obs_accuracy(int z, double obs_base) {
  return (1.0 + std::pow(obs_base, z - 1)) / 2.0;
}

bool fov_contains(const RelState& s, int n) noexcept {
  return std::abs(s.x_rel - n) <= s.z - 1 && std::abs(s.y_rel - n) <= s.z - 1;
}

double obs_likelihood(const RelState& s, Action a, ObsSymbol o,
                      const ModelParams& p) {
  if (a != Action::look) return o == ObsSymbol::none ? 1.0 : 0.0;
  if (o == ObsSymbol::none) return 0.0;
  const double acc = obs_accuracy(s.z, p.obs_base);
  return (o == ObsSymbol::seen) == fov_contains(s, p.n) ? acc : 1.0 - acc;
}

TransitionDist transition_dist(const RelState& s, Action a,
                               const ModelParams& p) {
  check_state(s, p.n);
  if (is_target(s, p.n)) {
    throw DomainError("no transitions from the terminal target state");
  }
  return build_transitions(s, a, p);
}

double reward(const RelState& s, Action /*a*/, const Outcome& outcome,
              const ModelParams& p) {
  if (outcome.bumped) return p.reward_oob;
  if (is_target(outcome.state, p.n) && !is_target(s, p.n)) {
    return p.reward_target;
  }
  return 0.0;
}

Model::Model(const ModelParams& params) : params_(params) {
  validate(params_);
  digest_ = params_digest(params_);
  const int n = params_.n;
  const int total = num_states(n);
  transitions_.reserve(static_cast<std::size_t>(total) * kNumActions);
  expected_reward_.reserve(static_cast<std::size_t>(total) * kNumActions);
  for (int i = 0; i < total; ++i) {
    const RelState s = state_unindex(i, n);
    for (Action a : kAllActions) {
      if (is_target(s, n)) {
        transitions_.push_back({{s, 1.0, false}});
        expected_reward_.push_back(0.0);
        continue;
      }
      TransitionDist dist = build_transitions(s, a, params_);
      double r = 0.0;
      for (const Outcome& o : dist) r += o.prob * reward(s, a, o, params_);
      transitions_.push_back(std::move(dist));
      expected_reward_.push_back(r);
    }
  }
  accuracy_.assign(static_cast<std::size_t>(n) + 1, 1.0);
  fov_.resize(static_cast<std::size_t>(n) + 1);
  for (int z = 1; z <= n; ++z) {
    accuracy_[static_cast<std::size_t>(z)] = obs_accuracy(z, params_.obs_base);
    auto& mask = fov_[static_cast<std::size_t>(z)];
    mask.assign(static_cast<std::size_t>(cells()), false);
    for (int y = 1; y <= side(); ++y) {
      for (int x = 1; x <= side(); ++x) {
        mask[static_cast<std::size_t>(cell_index(x, y, n))] =
            fov_contains({x, y, z}, n);
      }
    }
  }
}

}  // namespace relsearch
