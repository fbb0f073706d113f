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

#include "relsearch/belief.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "relsearch/error.hpp"

namespace relsearch {

Belief uniform_init(int n, int z0) {
  if (n < 1 || z0 < 1 || z0 > n) throw DomainError("uniform_init: bad z0");
  const int cells = num_cells(n);
  return {n, z0, std::vector<double>(static_cast<std::size_t>(cells),
                                     1.0 / static_cast<double>(cells))};
}

Belief delta_belief(int n, const RelState& s) {
  if (!in_bounds(s, n)) throw DomainError("delta_belief: state out of bounds");
  Belief b{n, s.z, std::vector<double>(static_cast<std::size_t>(num_cells(n)))};
  b.probs[static_cast<std::size_t>(cell_index(s.x_rel, s.y_rel, n))] = 1.0;
  return b;
}

double update_unnormalized(const Model& model, const Belief& b, Action a,
                           ObsSymbol o, int new_z, std::vector<double>& out) {
  const int n = model.n();
  const int cells = model.cells();
  out.assign(static_cast<std::size_t>(cells), 0.0);
  if (new_z < 1 || new_z > n) return 0.0;
  if (a == Action::look) {
    if (new_z != b.z || o == ObsSymbol::none) return 0.0;
    double total = 0.0;
    for (int c = 0; c < cells; ++c) {
      const double w = b.probs[static_cast<std::size_t>(c)] *
                       model.look_likelihood(b.z, c, o);
      out[static_cast<std::size_t>(c)] = w;
      total += w;
    }
    return total;
  }
  if (o != ObsSymbol::none) return 0.0;
  const int base = (b.z - 1) * cells;
  for (int c = 0; c < cells; ++c) {
    const double mass = b.probs[static_cast<std::size_t>(c)];
    if (mass == 0.0) continue;
    for (const Outcome& oc : model.transitions(base + c, a)) {
      if (oc.state.z != new_z) continue;
      out[static_cast<std::size_t>(cell_index(oc.state.x_rel, oc.state.y_rel,
                                              n))] += mass * oc.prob;
    }
  }
  double total = 0.0;
  for (double w : out) total += w;
  return total;
}

Belief update(const Model& model, const Belief& b, Action a, ObsSymbol o,
              int new_z) {
  if (b.n != model.n() ||
      b.probs.size() != static_cast<std::size_t>(model.cells())) {
    throw DomainError("belief does not match model size");
  }
  Belief next{b.n, new_z, {}};
  const double total = update_unnormalized(model, b, a, o, new_z, next.probs);
  if (!(total > 0.0)) {
    throw FilterDegenerateError(
        "posterior mass is zero after " + std::string(to_string(a)) + "/" +
        std::string(to_string(o)) + " at z=" + std::to_string(new_z));
  }
  for (double& w : next.probs) w /= total;
  return next;
}

Belief update(const Model& model, const Belief& b, Action a, ObsSymbol o) {
  const int z = std::clamp(b.z + displacement(a).dz, 1, model.n());
  return update(model, b, a, o, z);
}

CellEstimate most_likely(const Belief& b) {
  if (b.probs.empty()) throw DomainError("most_likely: empty belief");
  const auto it = std::max_element(b.probs.begin(), b.probs.end());
  const int c = static_cast<int>(it - b.probs.begin());
  const int side = side_length(b.n);
  return {c % side + 1, c / side + 1, *it};
}

double entropy(const Belief& b) {
  double h = 0.0;
  for (double p : b.probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

void write_belief(std::ostream& os, const Belief& b) {
  const int side = side_length(b.n);
  for (int y = 1; y <= side; ++y) {
    for (int x = 1; x <= side; ++x) {
      os << x << ' ' << y << ' '
         << format_double(b.probs[static_cast<std::size_t>(cell_index(x, y, b.n))])
         << '\n';
    }
  }
}

}  // namespace relsearch
