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

#ifndef RELSEARCH_BASELINES_HPP_
#define RELSEARCH_BASELINES_HPP_

#include <array>
#include <cstdint>
#include <utility>

#include "relsearch/model.hpp"

namespace relsearch {

// Human-operator style controller: climb with alternating looks until the
// target is seen, then descend on every positive look. A negative look while
// descending triggers a ring scan of the 8 same-level neighbours.
struct HeuristicCtl {
  enum class Phase : std::uint8_t { ascending, descending, scanning, sweeping };

  // Lawnmower position at max altitude: leg number and moves made in it.
  struct SweepCursor {
    int leg = 0;
    int step = 0;
    bool operator==(const SweepCursor&) const = default;
  };

  int n = 1;
  Phase phase = Phase::ascending;
  bool ever_seen = false;
  int parity = 0;     // 0: next action is a look, 1: next action is a motion
  int ring_step = 0;  // ring moves already issued, in [0, 8]
  SweepCursor sweep_cursor;

  bool operator==(const HeuristicCtl&) const = default;
};

// Neighbour ring; each entry is one unit move. Visits all eight neighbours of
// the cell it starts from and ends diagonally adjacent to it.
inline constexpr std::array<Action, 8> kRingMoves = {
    Action::north, Action::east, Action::south, Action::south,
    Action::west,  Action::west, Action::north, Action::north};

HeuristicCtl make_heuristic(int n);

// `last_obs` is the observation produced by the previous action (none after
// a motion or at the start).
std::pair<Action, HeuristicCtl> heuristic_next(const HeuristicCtl& ctl,
                                               ObsSymbol last_obs, int z);

// Descends with probability 0.1 (never at z = 1), otherwise moves uniformly
// among the four horizontal directions. Never looks.
struct RandomCtl {
  std::uint64_t seed = 0;  // SplitMix64 state
  bool operator==(const RandomCtl&) const = default;
};

inline constexpr double kRandomDescendProb = 0.1;

std::pair<Action, RandomCtl> random_next(const RandomCtl& ctl, int z);

}  // namespace relsearch

#endif  // RELSEARCH_BASELINES_HPP_
