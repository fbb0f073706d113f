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


#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "oracle_filter.hpp"
#include "relsearch/belief.hpp"
#include "relsearch/error.hpp"
#include "relsearch/random.hpp"

using namespace relsearch;

namespace {

ModelParams with(int n, double trans, double obs) {
  ModelParams p;
  p.n = n;
  p.trans_prob = trans;
  p.obs_base = obs;
  return p;
}

double sum(const Belief& b) { return std::accumulate(b.probs.begin(), b.probs.end(), 0.0); }

// Samples (action, observation, realized z) from a true relative state.
struct Step {
  Action a;
  ObsSymbol o;
  RelState next;
};

Step sample_step(const Model& m, const RelState& truth, Rng& rng) {
  const Action a = kAllActions[uniform_below(rng, kNumActions)];
  double u = uniform01(rng);
  RelState next = truth;
  for (const Outcome& oc : m.transitions(truth, a)) {
    next = oc.state;
    if (u < oc.prob) break;
    u -= oc.prob;
  }
  ObsSymbol o = ObsSymbol::none;
  if (a == Action::look) {
    const double p_seen = m.look_likelihood(next.z, cell_index(next.x_rel, next.y_rel, m.n()),
                                            ObsSymbol::seen);
    o = uniform01(rng) < p_seen ? ObsSymbol::seen : ObsSymbol::not_seen;
  }
  return {a, o, next};
}

}  // namespace

TEST_SUITE("belief") {
  TEST_CASE("uniform initial belief") {
    const Belief b = uniform_init(7, 3);
    CHECK(b.z == 3);
    CHECK(b.probs.size() == 169);
    for (double p : b.probs) CHECK(p == doctest::Approx(1.0 / 169.0));
    CHECK(sum(b) == doctest::Approx(1.0).epsilon(1e-12));
    const Belief one = uniform_init(1, 1);
    CHECK(one.probs == std::vector<double>{1.0});
    CHECK_THROWS_AS(uniform_init(7, 0), DomainError);
    CHECK_THROWS_AS(uniform_init(7, 8), DomainError);
  }

  TEST_CASE("a look at ground level pins the target") {
    const Model m(with(7, 0.88, 0.88));
    const Belief b = update(m, uniform_init(7, 1), Action::look, ObsSymbol::seen, 1);
    for (int c = 0; c < m.cells(); ++c) {
      CHECK(b.probs[static_cast<std::size_t>(c)] == (c == m.target_cell() ? 1.0 : 0.0));
    }
    CHECK(entropy(b) == 0.0);
  }

  TEST_CASE("negative look at z=2") {
    const Model m(with(7, 0.88, 0.88));
    const Belief b = update(m, uniform_init(7, 2), Action::look, ObsSymbol::not_seen, 2);
    const double norm = 9 * 0.06 + 160 * 0.94;
    for (int y = 1; y <= 13; ++y) {
      for (int x = 1; x <= 13; ++x) {
        const bool in_fov = std::abs(x - 7) <= 1 && std::abs(y - 7) <= 1;
        CHECK(b.probs[static_cast<std::size_t>(cell_index(x, y, 7))] ==
              doctest::Approx((in_fov ? 0.06 : 0.94) / norm).epsilon(1e-12));
      }
    }
    const CellEstimate ml = most_likely(b);
    CHECK(ml.x_rel == 1);
    CHECK(ml.y_rel == 1);
    CHECK(ml.prob == doctest::Approx(0.94 / norm));
  }

  TEST_CASE("deterministic motion shifts a delta") {
    const Model m(with(7, 1.0, 0.88));
    const Belief b = update(m, delta_belief(7, {4, 5, 3}), Action::north, ObsSymbol::none, 3);
    CHECK(b == delta_belief(7, {4, 6, 3}));
  }

  TEST_CASE("motion conditions on the realized altitude") {
    const Model m(with(5, 0.76, 0.88));
    const Belief start = delta_belief(5, {5, 5, 3});
    // Drifted up instead of moving north: only the ascend outcome survives.
    const Belief up = update(m, start, Action::north, ObsSymbol::none, 4);
    CHECK(up == delta_belief(5, {5, 5, 4}));
    // Same altitude: the four horizontal outcomes, renormalized.
    const Belief level = update(m, start, Action::north, ObsSymbol::none, 3);
    const double norm = 0.76 + 3 * 0.048;
    CHECK(level.probs[static_cast<std::size_t>(cell_index(5, 6, 5))] ==
          doctest::Approx(0.76 / norm));
    CHECK(level.probs[static_cast<std::size_t>(cell_index(4, 5, 5))] ==
          doctest::Approx(0.048 / norm));
    // Two levels is impossible.
    CHECK_THROWS_AS(update(m, start, Action::north, ObsSymbol::none, 1), FilterDegenerateError);
    // The shorthand overload assumes the commanded altitude.
    CHECK(update(m, start, Action::ascend, ObsSymbol::none) ==
          update(m, start, Action::ascend, ObsSymbol::none, 4));
  }

  TEST_CASE("impossible observations are reported") {
    const Model m(with(7, 0.88, 1.0));
    // Perfect sensor at z=1 over a non-target cell cannot see the target.
    CHECK_THROWS_AS(update(m, delta_belief(7, {3, 3, 1}), Action::look, ObsSymbol::seen, 1),
                    FilterDegenerateError);
    CHECK_THROWS_AS(update(m, uniform_init(7, 2), Action::look, ObsSymbol::none, 2),
                    FilterDegenerateError);
    CHECK_THROWS_AS(update(m, uniform_init(7, 2), Action::west, ObsSymbol::seen, 2),
                    FilterDegenerateError);
    CHECK_THROWS_AS(update(m, uniform_init(5, 2), Action::look, ObsSymbol::seen, 2), DomainError);
  }

  TEST_CASE("the target cell is absorbing at ground level") {
    const Model m(with(3, 0.7, 0.9));
    const Belief b = update(m, delta_belief(3, target_state(3)), Action::east, ObsSymbol::none, 1);
    CHECK(b == delta_belief(3, target_state(3)));
  }

  TEST_CASE("most likely and entropy") {
    const Belief d = delta_belief(7, {2, 9, 4});
    const CellEstimate ml = most_likely(d);
    CHECK(ml.x_rel == 2);
    CHECK(ml.y_rel == 9);
    CHECK(ml.prob == 1.0);
    CHECK(entropy(d) == 0.0);
    const CellEstimate u = most_likely(uniform_init(7, 1));
    CHECK(u.x_rel == 1);
    CHECK(u.y_rel == 1);
    CHECK(u.prob == doctest::Approx(1.0 / 169.0));
    CHECK(entropy(uniform_init(7, 1)) == doctest::Approx(std::log(169.0)).epsilon(1e-12));
    CHECK(entropy(uniform_init(7, 1)) == doctest::Approx(5.1299).epsilon(1e-4));
  }

  TEST_CASE("normalization holds along long random chains") {
    const Model m(with(3, 0.82, 0.8));
    Rng rng = make_rng(11);
    int updates = 0;
    double worst = 0.0;
    double max_entropy = 0.0;
    for (int chain = 0; chain < 1000; ++chain) {
      RelState truth = state_unindex(static_cast<int>(uniform_below(rng, 75)), 3);
      if (is_target(truth, 3)) truth.z = 2;
      Belief b = uniform_init(3, truth.z);
      for (int t = 0; t < 100; ++t, ++updates) {
        const Step s = sample_step(m, truth, rng);
        b = update(m, b, s.a, s.o, s.next.z);  // never degenerate on sampled data
        truth = s.next;
        worst = std::max(worst, std::abs(sum(b) - 1.0));
        max_entropy = std::max(max_entropy, entropy(b));
        for (double p : b.probs) REQUIRE(p >= 0.0);
      }
    }
    CHECK(updates == 100000);
    CHECK(worst <= 1e-9);
    CHECK(max_entropy <= std::log(25.0) + 1e-12);
  }

  TEST_CASE("matches a brute-force absolute-state filter") {
    const int n = 3;
    const Model m(with(n, 0.82, 0.85));
    Rng rng = make_rng(2024);
    double worst = 0.0;
    for (int seq = 0; seq < 20; ++seq) {
      const int z0 = 1 + static_cast<int>(uniform_below(rng, n));
      oracle::JointFilter joint(n, 0.82, 0.85, z0);
      // True joint state: target anywhere, drone at a legal offset.
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
    CHECK(worst <= 1e-9);
  }

  TEST_CASE("belief export") {
    std::ostringstream os;
    write_belief(os, delta_belief(2, {1, 2, 1}));
    CHECK(os.str() == "1 1 0\n2 1 0\n3 1 0\n1 2 1\n2 2 0\n3 2 0\n1 3 0\n2 3 0\n3 3 0\n");
  }
}
