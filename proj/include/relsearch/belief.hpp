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

#ifndef RELSEARCH_BELIEF_HPP_
#define RELSEARCH_BELIEF_HPP_

#include <iosfwd>
#include <vector>

#include "relsearch/model.hpp"

namespace relsearch {

// Distribution over the (x_rel, y_rel) cells of one altitude slice. The
// altitude itself is known exactly.
struct Belief {
  int n = 1;
  int z = 1;
  std::vector<double> probs;  // indexed by cell_index()

  bool operator==(const Belief&) const = default;
};

Belief uniform_init(int n, int z0);

// Point mass at one cell.
Belief delta_belief(int n, const RelState& s);

// Predict through the transition model conditioned on the reported altitude
// `new_z`, then correct with the observation likelihood and renormalize.
// Throws FilterDegenerateError when no state explains the observation.
Belief update(const Model& model, const Belief& b, Action a, ObsSymbol o,
              int new_z);

// Same, assuming the altitude the action intends (clamped to [1, n]).
Belief update(const Model& model, const Belief& b, Action a, ObsSymbol o);

// Unnormalized predict-correct step; returns the total posterior mass.
double update_unnormalized(const Model& model, const Belief& b, Action a,
                           ObsSymbol o, int new_z, std::vector<double>& out);

struct CellEstimate {
  int x_rel = 0;
  int y_rel = 0;
  double prob = 0.0;
};

// Argmax cell, lowest index on ties.
CellEstimate most_likely(const Belief& b);

// Shannon entropy in nats.
double entropy(const Belief& b);

// `x_rel y_rel prob` per cell, row-major.
void write_belief(std::ostream& os, const Belief& b);

}  // namespace relsearch

#endif  // RELSEARCH_BELIEF_HPP_
