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

#include "relsearch/baselines.hpp"

#include <algorithm>

#include "relsearch/random.hpp"

namespace relsearch {

namespace {

using Phase = HeuristicCtl::Phase;

Action sweep_move(HeuristicCtl::SweepCursor& c, int n) {
  const int leg_length = std::max(1, 2 * n - 2);
  if (c.step < leg_length) {
    ++c.step;
    return c.leg % 2 == 0 ? Action::west : Action::east;
  }
  // Shift one row; reverse the vertical direction after crossing the grid.
  const Action shift = (c.leg / leg_length) % 2 == 0 ? Action::north : Action::south;
  c.step = 0;
  ++c.leg;
  return shift;
}

Action start_sweep(HeuristicCtl& ctl) {
  ctl.phase = Phase::sweeping;
  ctl.ring_step = 0;
  return sweep_move(ctl.sweep_cursor, ctl.n);
}

Action start_descent(HeuristicCtl& ctl) {
  ctl.phase = Phase::descending;
  ctl.ever_seen = true;
  ctl.ring_step = 0;
  return Action::descend;
}

}  // namespace

HeuristicCtl make_heuristic(int n) {
  HeuristicCtl ctl;
  ctl.n = n;
  return ctl;
}

std::pair<Action, HeuristicCtl> heuristic_next(const HeuristicCtl& ctl,
                                               ObsSymbol last_obs, int z) {
  HeuristicCtl next = ctl;
  if (ctl.parity == 0) {
    next.parity = 1;
    return {Action::look, next};
  }
  next.parity = 0;
  const bool seen = last_obs == ObsSymbol::seen;
  switch (ctl.phase) {
    case Phase::ascending:
      if (seen) return {start_descent(next), next};
      if (z < ctl.n) return {Action::ascend, next};
      return {start_sweep(next), next};
    case Phase::descending:
      if (seen) return {Action::descend, next};
      next.phase = Phase::scanning;
      next.ring_step = 1;
      return {kRingMoves[0], next};
    case Phase::scanning:
      if (seen) return {start_descent(next), next};
      if (ctl.ring_step < static_cast<int>(kRingMoves.size())) {
        ++next.ring_step;
        return {kRingMoves[static_cast<std::size_t>(ctl.ring_step)], next};
      }
      // Full ring without a sighting: back up one level and retry.
      next.phase = Phase::descending;
      next.ring_step = 0;
      if (z < ctl.n) return {Action::ascend, next};
      return {start_sweep(next), next};
    case Phase::sweeping:
      if (seen) return {start_descent(next), next};
      return {sweep_move(next.sweep_cursor, next.n), next};
  }
  return {Action::look, next};
}

std::pair<Action, RandomCtl> random_next(const RandomCtl& ctl, int z) {
  RandomCtl next = ctl;
  const double u = static_cast<double>(splitmix64(next.seed) >> 11) * 0x1.0p-53;
  if (z > 1 && u < kRandomDescendProb) return {Action::descend, next};
  static constexpr std::array<Action, 4> kHorizontal = {
      Action::east, Action::west, Action::north, Action::south};
  const std::uint64_t pick = splitmix64(next.seed) >> 62;
  return {kHorizontal[pick], next};
}

}  // namespace relsearch
