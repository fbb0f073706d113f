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

#include "relsearch/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "relsearch/error.hpp"
#include "relsearch/random.hpp"

namespace relsearch {

namespace {

using Clock = std::chrono::steady_clock;

// Four independent partial sums; fixed order, so results are reproducible.
double dot(const double* a, const double* b, int len) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  int i = 0;
  for (; i + 4 <= len; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < len; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

// Q(s, a) given state values.
std::array<double, kNumActions> q_values(const Model& model, int s,
                                         const std::vector<double>& v) {
  std::array<double, kNumActions> q{};
  const double gamma = model.params().discount;
  for (Action a : kAllActions) {
    double future = 0.0;
    for (const Outcome& o : model.transitions(s, a)) {
      future += o.prob * v[static_cast<std::size_t>(state_index(o.state, model.n()))];
    }
    q[static_cast<std::size_t>(index_of(a))] =
        model.expected_reward(s, a) + gamma * future;
  }
  return q;
}

Action argmax_action(const std::array<double, kNumActions>& q) {
  int best = 0;
  for (int a = 1; a < kNumActions; ++a) {
    if (q[static_cast<std::size_t>(a)] > q[static_cast<std::size_t>(best)]) best = a;
  }
  return static_cast<Action>(best);
}

Policy q_policy(const Model& model, PolicyKind kind) {
  // Tight enough that the Q-vectors stay a valid upper bound to ~1e-9.
  const ValueTable vt = mdp_value_iteration(model, 1e-10);
  Policy pol{model.params(), model.digest(), kind, {}};
  pol.slices.resize(static_cast<std::size_t>(model.n()));
  const int cells = model.cells();
  for (int z = 1; z <= model.n(); ++z) {
    for (Action a : kAllActions) {
      AlphaVector alpha{a, z, std::vector<double>(static_cast<std::size_t>(cells))};
      for (int c = 0; c < cells; ++c) {
        alpha.weights[static_cast<std::size_t>(c)] =
            vt.q[static_cast<std::size_t>((z - 1) * cells + c)]
                [static_cast<std::size_t>(index_of(a))];
      }
      pol.slices[static_cast<std::size_t>(z - 1)].push_back(std::move(alpha));
    }
  }
  return pol;
}

// Alpha vectors of one slice stored as a dense row-major matrix.
// A backed-up vector remembers the successor vectors it was built from, so
// pruning can keep them and greedy execution stays backed by the bound.
struct ChildRef {
  int z = 0;  // 0: no child on this branch
  int index = 0;
};
using Children = std::array<ChildRef, 3>;

struct SliceSet {
  std::vector<double> weights;
  std::vector<Action> actions;
  std::vector<Children> children;
  std::size_t pinned = 0;  // leading vectors that pruning keeps

  std::size_t size() const { return actions.size(); }
  const double* row(std::size_t k, int cells) const {
    return weights.data() + k * static_cast<std::size_t>(cells);
  }
  void add(Action a, const double* w, int cells, const Children& from = {}) {
    actions.push_back(a);
    weights.insert(weights.end(), w, w + cells);
    children.push_back(from);
  }
};

struct ArgMax {
  int index = -1;
  double value = -std::numeric_limits<double>::infinity();
};

ArgMax best_alpha(const SliceSet& set, const double* b, int cells) {
  ArgMax best;
  for (std::size_t k = 0; k < set.size(); ++k) {
    const double v = dot(set.row(k, cells), b, cells);
    if (v > best.value) best = {static_cast<int>(k), v};
  }
  return best;
}

// One point-based Bellman backup. Branches of an action are indexed by the
// next altitude and observation; look has (z, seen) and (z, not_seen), a
// motion has one none-branch per reachable altitude.
class Backup {
 public:
  Backup(const Model& model, const std::vector<SliceSet>& sets)
      : model_(model), sets_(sets), cells_(model.cells()) {
    tau_.resize(static_cast<std::size_t>(kNumActions * kBranches * cells_));
    // Fallback choice for branches the belief cannot reach.
    uniform_best_.resize(sets.size());
    const std::vector<double> flat(static_cast<std::size_t>(cells_), 1.0);
    for (std::size_t z = 0; z < sets.size(); ++z) {
      uniform_best_[z] = std::max(0, best_alpha(sets[z], flat.data(), cells_).index);
    }
  }

  // Returns the backed-up alpha for `b`, its action and its successors.
  Action run(const Belief& b, std::vector<double>& alpha, Children& from) {
    const int z = b.z;
    project(b);
    std::array<std::array<ArgMax, kBranches>, kNumActions> best{};
    // All branches landing in the same slice are scored in one pass over it.
    for (int nz = std::max(1, z - 1); nz <= std::min(model_.n(), z + 1); ++nz) {
      jobs_.clear();
      for (int a = 0; a < kNumActions; ++a) {
        for (int br = 0; br < kBranches; ++br) {
          const auto act = static_cast<Action>(a);
          if (branch_valid(z, act, br) && branch_z(z, act, br) == nz && reached_[a][br]) {
            jobs_.push_back({a, br});
          }
        }
      }
      if (jobs_.empty()) continue;
      const SliceSet& set = sets_[static_cast<std::size_t>(nz - 1)];
      for (std::size_t k = 0; k < set.size(); ++k) {
        const double* row = set.row(k, cells_);
        for (const auto& [a, br] : jobs_) {
          const double v = dot(row, tau(a, br), cells_);
          ArgMax& m = best[static_cast<std::size_t>(a)][static_cast<std::size_t>(br)];
          if (v > m.value) m = {static_cast<int>(k), v};
        }
      }
    }

    const double gamma = model_.params().discount;
    double best_value = -std::numeric_limits<double>::infinity();
    int best_action = 0;
    for (int a = 0; a < kNumActions; ++a) {
      double v = reward_[static_cast<std::size_t>(a)];
      for (int br = 0; br < kBranches; ++br) {
        if (reached_[a][br]) v += gamma * best[static_cast<std::size_t>(a)][static_cast<std::size_t>(br)].value;
      }
      if (v > best_value) {
        best_value = v;
        best_action = a;
      }
    }
    const auto act = static_cast<Action>(best_action);
    std::array<int, kBranches> choice{};
    for (int br = 0; br < kBranches; ++br) {
      choice[static_cast<std::size_t>(br)] = -1;
      if (!branch_valid(z, act, br)) continue;
      choice[static_cast<std::size_t>(br)] =
          reached_[best_action][br]
              ? best[static_cast<std::size_t>(best_action)][static_cast<std::size_t>(br)].index
              : uniform_best_[static_cast<std::size_t>(branch_z(z, act, br) - 1)];
    }
    build(z, act, choice, alpha);
    from = {};
    for (int br = 0; br < kBranches; ++br) {
      if (choice[static_cast<std::size_t>(br)] >= 0) {
        from[static_cast<std::size_t>(br)] = {branch_z(z, act, br),
                                              choice[static_cast<std::size_t>(br)]};
      }
    }
    return act;
  }

 private:
  static constexpr int kBranches = 3;  // z-1, z, z+1 (or seen / not_seen)

  int branch_z(int z, Action a, int branch) const {
    return a == Action::look ? z : z + branch - 1;
  }
  bool branch_valid(int z, Action a, int branch) const {
    if (a == Action::look) return branch < 2;
    const int nz = z + branch - 1;
    return nz >= 1 && nz <= model_.n();
  }
  double* tau(int a, int br) {
    return tau_.data() + static_cast<std::size_t>((a * kBranches + br) * cells_);
  }

  // Unnormalized successor beliefs and expected immediate reward per action.
  void project(const Belief& b) {
    const int z = b.z;
    const int base = (z - 1) * cells_;
    std::fill(tau_.begin(), tau_.end(), 0.0);
    reward_.fill(0.0);
    for (int c = 0; c < cells_; ++c) {
      const double p = b.probs[static_cast<std::size_t>(c)];
      if (p == 0.0) continue;
      for (int a = 0; a < kNumActions; ++a) {
        const auto act = static_cast<Action>(a);
        reward_[static_cast<std::size_t>(a)] += p * model_.expected_reward(base + c, act);
        if (act == Action::look) {
          tau(a, 0)[c] = p * model_.look_likelihood(z, c, ObsSymbol::seen);
          tau(a, 1)[c] = p * model_.look_likelihood(z, c, ObsSymbol::not_seen);
          continue;
        }
        for (const Outcome& o : model_.transitions(base + c, act)) {
          tau(a, o.state.z - z + 1)[cell_index(o.state.x_rel, o.state.y_rel, model_.n())] +=
              p * o.prob;
        }
      }
    }
    for (int a = 0; a < kNumActions; ++a) {
      for (int br = 0; br < kBranches; ++br) {
        const double* t = tau(a, br);
        reached_[a][br] = branch_valid(z, static_cast<Action>(a), br) &&
                          std::any_of(t, t + cells_, [](double w) { return w > 0.0; });
      }
    }
  }

  void build(int z, Action a, const std::array<int, kBranches>& choice,
             std::vector<double>& alpha) const {
    const int base = (z - 1) * cells_;
    const double gamma = model_.params().discount;
    alpha.assign(static_cast<std::size_t>(cells_), 0.0);
    auto row = [&](int br) {
      const int nz = branch_z(z, a, br);
      return sets_[static_cast<std::size_t>(nz - 1)].row(
          static_cast<std::size_t>(choice[static_cast<std::size_t>(br)]), cells_);
    };
    for (int c = 0; c < cells_; ++c) {
      double v = model_.expected_reward(base + c, a);
      if (a == Action::look) {
        v += gamma * (model_.look_likelihood(z, c, ObsSymbol::seen) * row(0)[c] +
                      model_.look_likelihood(z, c, ObsSymbol::not_seen) * row(1)[c]);
      } else {
        double future = 0.0;
        for (const Outcome& o : model_.transitions(base + c, a)) {
          const int br = o.state.z - z + 1;
          future += o.prob * row(br)[cell_index(o.state.x_rel, o.state.y_rel, model_.n())];
        }
        v += gamma * future;
      }
      alpha[static_cast<std::size_t>(c)] = v;
    }
  }

  const Model& model_;
  const std::vector<SliceSet>& sets_;
  int cells_;
  std::vector<double> tau_;
  std::array<double, kNumActions> reward_{};
  bool reached_[kNumActions][kBranches] = {};
  std::vector<std::pair<int, int>> jobs_;
  std::vector<int> uniform_best_;
};

// Value of following one fixed action forever; a lower bound on V*.
std::vector<double> blind_values(const Model& model, Action a) {
  const int total = model.states();
  const double gamma = model.params().discount;
  std::vector<double> v(static_cast<std::size_t>(total), 0.0);
  std::vector<double> next(v.size());
  for (int it = 0; it < 100000; ++it) {
    double delta = 0.0;
    for (int s = 0; s < total; ++s) {
      double future = 0.0;
      for (const Outcome& o : model.transitions(s, a)) {
        future += o.prob * v[static_cast<std::size_t>(state_index(o.state, model.n()))];
      }
      next[static_cast<std::size_t>(s)] = model.expected_reward(s, a) + gamma * future;
      delta = std::max(delta, std::abs(next[static_cast<std::size_t>(s)] -
                                       v[static_cast<std::size_t>(s)]));
    }
    v.swap(next);
    if (delta < 1e-12) break;
  }
  // Shave the iteration residual so the vector stays a strict lower bound.
  for (double& x : v) x -= 1e-9;
  v[static_cast<std::size_t>(state_index(target_state(model.n()), model.n()))] = 0.0;
  return v;
}

// Value of executing `plan` open loop and then looking forever. Any fixed
// action sequence is a conditional plan, so this is a valid lower bound.
std::vector<double> sequence_values(const Model& model, const std::vector<Action>& plan) {
  const int total = model.states();
  const double gamma = model.params().discount;
  std::vector<double> v(static_cast<std::size_t>(total), 0.0);
  std::vector<double> next(v.size());
  for (auto it = plan.rbegin(); it != plan.rend(); ++it) {
    for (int s = 0; s < total; ++s) {
      double future = 0.0;
      for (const Outcome& o : model.transitions(s, *it)) {
        future += o.prob * v[static_cast<std::size_t>(state_index(o.state, model.n()))];
      }
      next[static_cast<std::size_t>(s)] = model.expected_reward(s, *it) + gamma * future;
    }
    v.swap(next);
  }
  return v;
}

// Vectors for the open-loop shortest route from every state: the MDP greedy
// action along the most likely outcome. They anchor beliefs concentrated on
// one cell, which sampled trajectories rarely reach far from the target.
void add_route_vectors(const Model& model, std::vector<SliceSet>& sets) {
  const int n = model.n();
  const int cells = model.cells();
  const ValueTable vt = mdp_value_iteration(model, 1e-9);
  std::vector<std::vector<std::vector<Action>>> seen(static_cast<std::size_t>(n));
  for (int start = 0; start < model.states(); ++start) {
    RelState s = state_unindex(start, n);
    if (is_target(s, n)) continue;
    std::vector<Action> plan;
    for (int step = 0; step < 4 * n && !is_target(s, n); ++step) {
      const Action a = vt.greedy[static_cast<std::size_t>(state_index(s, n))];
      plan.push_back(a);
      const TransitionDist& dist = model.transitions(s, a);
      s = std::max_element(dist.begin(), dist.end(), [](const Outcome& x, const Outcome& y) {
            return x.prob < y.prob;
          })->state;
    }
    const int z = state_unindex(start, n).z;
    auto& known = seen[static_cast<std::size_t>(z - 1)];
    if (std::find(known.begin(), known.end(), plan) != known.end()) continue;
    known.push_back(plan);
    const std::vector<double> v = sequence_values(model, plan);
    auto& set = sets[static_cast<std::size_t>(z - 1)];
    set.add(plan.front(), v.data() + static_cast<std::size_t>((z - 1) * cells), cells);
  }
}

std::vector<SliceSet> initial_sets(const Model& model) {
  const int cells = model.cells();
  std::vector<SliceSet> sets(static_cast<std::size_t>(model.n()));
  add_route_vectors(model, sets);
  for (Action a : kAllActions) {
    const std::vector<double> v = blind_values(model, a);
    for (int z = 1; z <= model.n(); ++z) {
      sets[static_cast<std::size_t>(z - 1)].add(
          a, v.data() + static_cast<std::size_t>((z - 1) * cells), cells);
    }
  }
  // Blind and route vectors have no recorded successors; keep them all.
  for (SliceSet& set : sets) set.pinned = set.size();
  return sets;
}

bool near_duplicate(const Belief& a, const Belief& b) {
  if (a.z != b.z) return false;
  for (std::size_t i = 0; i < a.probs.size(); ++i) {
    if (std::abs(a.probs[i] - b.probs[i]) >= 1e-6) return false;
  }
  return true;
}

class PointSet {
 public:
  explicit PointSet(int n) : by_z_(static_cast<std::size_t>(n)) {}

  bool add(Belief b) {
    auto& bucket = by_z_[static_cast<std::size_t>(b.z - 1)];
    for (std::size_t idx : bucket) {
      if (near_duplicate(points_[idx], b)) return false;
    }
    bucket.push_back(points_.size());
    points_.push_back(std::move(b));
    return true;
  }
  std::size_t size() const { return points_.size(); }
  const std::vector<Belief>& points() const { return points_; }
  std::vector<Belief> release() { return std::move(points_); }

 private:
  std::vector<Belief> points_;
  std::vector<std::vector<std::size_t>> by_z_;
};

// Point-set growth schedule: the set is filled in kBatches equal batches,
// each added after at most kRoundSweeps sweeps on the previous one.
constexpr std::size_t kBatches = 8;
constexpr int kRoundSweeps = 10;
// Share of random actions when sampling along the current policy.
constexpr double kExplore = 0.2;

// Adds the uniform beliefs, then forward-simulates trajectories from uniform
// non-target starts (depth 4n), recording every belief reached, until the
// set holds `limit` points.
template <typename Choose>
void seed_points(const Model& model, PointSet& points, std::size_t limit, int depth, Rng& rng,
                 Choose&& choose) {
  const int n = model.n();
  for (int z = 1; z <= n && points.size() < limit; ++z) points.add(uniform_init(n, z));
  if (model.states() <= 1) return;
  const int target = state_index(target_state(n), n);
  const std::size_t max_trajectories = 50 * std::max<std::size_t>(limit, 1);
  for (std::size_t traj = 0; traj < max_trajectories && points.size() < limit; ++traj) {
    int start = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(model.states() - 1)));
    if (start >= target) ++start;
    RelState truth = state_unindex(start, n);
    Belief b = uniform_init(n, truth.z);
    for (int step = 0; step < depth && points.size() < limit; ++step) {
      const Action a = choose(b, truth);
      double u = uniform01(rng);
      const TransitionDist& dist = model.transitions(truth, a);
      const Outcome* picked = &dist.back();
      for (const Outcome& o : dist) {
        if (u < o.prob) {
          picked = &o;
          break;
        }
        u -= o.prob;
      }
      truth = picked->state;
      if (is_target(truth, n)) break;
      ObsSymbol obs = ObsSymbol::none;
      if (a == Action::look) {
        const int c = cell_index(truth.x_rel, truth.y_rel, n);
        obs = uniform01(rng) < model.look_likelihood(truth.z, c, ObsSymbol::seen)
                  ? ObsSymbol::seen
                  : ObsSymbol::not_seen;
      }
      b = update(model, b, a, obs, truth.z);
      points.add(b);
    }
  }
}

// Keeps the pinned vectors, the vectors maximal at some point, and the vectors
// their backups chose on each branch. Slices without points are left alone.
void prune(std::vector<SliceSet>& sets, const std::vector<Belief>& points, int cells) {
  std::vector<std::vector<bool>> keep(sets.size());
  std::vector<ChildRef> pending;
  auto mark = [&](int z, int k) {
    std::vector<bool>& flags = keep[static_cast<std::size_t>(z - 1)];
    if (!flags[static_cast<std::size_t>(k)]) {
      flags[static_cast<std::size_t>(k)] = true;
      pending.push_back({z, k});
    }
  };
  std::vector<bool> has_points(sets.size(), false);
  for (const Belief& b : points) has_points[static_cast<std::size_t>(b.z - 1)] = true;
  for (std::size_t zi = 0; zi < sets.size(); ++zi) {
    keep[zi].assign(sets[zi].size(), false);
  }
  for (std::size_t zi = 0; zi < sets.size(); ++zi) {
    const int z = static_cast<int>(zi) + 1;
    for (std::size_t k = 0; k < sets[zi].size(); ++k) {
      if (k < sets[zi].pinned || !has_points[zi]) mark(z, static_cast<int>(k));
    }
  }
  for (const Belief& b : points) {
    const ArgMax m = best_alpha(sets[static_cast<std::size_t>(b.z - 1)], b.probs.data(), cells);
    if (m.index >= 0) mark(b.z, m.index);
  }
  // Keep the direct successors of every point-maximal vector, so a greedy step
  // from a kept vector always has its follow-up plan available. Deeper
  // closure makes the set grow without bound.
  const std::vector<ChildRef> roots = pending;
  for (const ChildRef& r : roots) {
    for (const ChildRef& c :
         sets[static_cast<std::size_t>(r.z - 1)].children[static_cast<std::size_t>(r.index)]) {
      if (c.z > 0) mark(c.z, c.index);
    }
  }
  // Compact, then rewrite child references to the new positions.
  std::vector<std::vector<int>> moved(sets.size());
  for (std::size_t zi = 0; zi < sets.size(); ++zi) {
    moved[zi].assign(sets[zi].size(), -1);
    int next = 0;
    for (std::size_t k = 0; k < sets[zi].size(); ++k) {
      if (keep[zi][k]) moved[zi][k] = next++;
    }
  }
  for (std::size_t zi = 0; zi < sets.size(); ++zi) {
    SliceSet kept;
    kept.pinned = sets[zi].pinned;
    for (std::size_t k = 0; k < sets[zi].size(); ++k) {
      if (!keep[zi][k]) continue;
      Children from = sets[zi].children[k];
      for (ChildRef& c : from) {
        if (c.z > 0) {
          c.index = moved[static_cast<std::size_t>(c.z - 1)][static_cast<std::size_t>(c.index)];
          if (c.index < 0) c = ChildRef{};
        }
      }
      kept.add(sets[zi].actions[k], sets[zi].row(k, cells), cells, from);
    }
    sets[zi] = std::move(kept);
  }
}

}  // namespace

std::string_view to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::pbvi: return "pbvi";
    case PolicyKind::qmdp: return "qmdp";
    case PolicyKind::mdp: return "mdp";
  }
  return "pbvi";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view token) {
  for (PolicyKind k : {PolicyKind::pbvi, PolicyKind::qmdp, PolicyKind::mdp}) {
    if (to_string(k) == token) return k;
  }
  return std::nullopt;
}

std::size_t Policy::alpha_count() const noexcept {
  std::size_t total = 0;
  for (const auto& s : slices) total += s.size();
  return total;
}

ValueTable mdp_value_iteration(const Model& model, double epsilon) {
  const int total = model.states();
  const double gamma = model.params().discount;
  const double threshold = epsilon * (1.0 - gamma) / gamma;
  ValueTable vt;
  vt.values.assign(static_cast<std::size_t>(total), 0.0);
  std::vector<double> next(vt.values.size(), 0.0);
  const int target = state_index(target_state(model.n()), model.n());
  for (;;) {
    ++vt.iterations;
    double delta = 0.0;
    for (int s = 0; s < total; ++s) {
      if (s == target) continue;
      const auto q = q_values(model, s, vt.values);
      const double best = *std::max_element(q.begin(), q.end());
      delta = std::max(delta, std::abs(best - vt.values[static_cast<std::size_t>(s)]));
      next[static_cast<std::size_t>(s)] = best;
    }
    vt.values.swap(next);
    if (delta <= threshold) break;
  }
  vt.q.resize(static_cast<std::size_t>(total));
  vt.greedy.resize(static_cast<std::size_t>(total), Action::look);
  for (int s = 0; s < total; ++s) {
    if (s == target) {
      vt.q[static_cast<std::size_t>(s)].fill(0.0);
      continue;
    }
    vt.q[static_cast<std::size_t>(s)] = q_values(model, s, vt.values);
    vt.greedy[static_cast<std::size_t>(s)] = argmax_action(vt.q[static_cast<std::size_t>(s)]);
  }
  return vt;
}

Policy solve_qmdp(const Model& model) { return q_policy(model, PolicyKind::qmdp); }

Policy solve_mdp(const Model& model) { return q_policy(model, PolicyKind::mdp); }

std::vector<Belief> sample_belief_points(const Model& model, const Policy& guide,
                                         const SolverConfig& cfg) {
  PointSet points(model.n());
  Rng rng = make_rng(cfg.seed);
  seed_points(model, points, static_cast<std::size_t>(std::max(cfg.max_points, 0)),
              4 * model.n(), rng, [&](const Belief& b, const RelState&) {
                return uniform01(rng) < 0.5 ? policy_action(guide, model, b)
                                            : kAllActions[uniform_below(rng, kNumActions)];
              });
  return points.release();
}

Policy solve_pbvi(const Model& model, const SolverConfig& cfg, SolveStats* stats) {
  if (cfg.max_points < 1 || !(cfg.epsilon > 0.0) || cfg.time_budget.count() < 0.0 ||
      cfg.max_sweeps < 0) {
    throw DomainError("invalid solver config");
  }
  const auto started = Clock::now();
  const auto deadline =
      started + std::chrono::duration_cast<Clock::duration>(cfg.time_budget);
  const int n = model.n();
  const int cells = model.cells();
  const auto max_points = static_cast<std::size_t>(cfg.max_points);

  const Policy guide = solve_qmdp(model);
  Rng rng = make_rng(cfg.seed);
  PointSet points(n);
  std::vector<SliceSet> sets = initial_sets(model);
  auto random_action = [&] { return kAllActions[uniform_below(rng, kNumActions)]; };
  // First batch: QMDP/uniform mixture.
  seed_points(model, points, std::min(max_points, std::max<std::size_t>(n, max_points / kBatches)),
              4 * n, rng, [&](const Belief& b, const RelState&) {
                return uniform01(rng) < 0.5 ? policy_action(guide, model, b) : random_action();
              });

  SolveStats local;
  auto initial_value = [&] {
    double total = 0.0;
    for (int z = 1; z <= n; ++z) {
      const Belief u = uniform_init(n, z);
      total += best_alpha(sets[static_cast<std::size_t>(z - 1)], u.probs.data(), cells).value;
    }
    return total / n;
  };
  local.initial_value_history.push_back(initial_value());

  std::vector<double> alpha;
  Children from;
  int round_sweeps = 0;
  bool exhausted = false;
  for (;;) {
    if (cfg.max_sweeps > 0 && local.sweeps >= cfg.max_sweeps) break;
    // In-place sweep, last sampled point first, so value flows backwards
    // along each sampled trajectory within a single pass. Vectors are only
    // added during the sweep, so no point's value can drop.
    const std::vector<Belief>& pts = points.points();
    Backup backup(model, sets);
    double improvement = 0.0;
    bool timed_out = false;
    for (std::size_t i = pts.size(); i-- > 0;) {
      if (Clock::now() > deadline) {
        timed_out = true;
        break;
      }
      const Belief& b = pts[i];
      auto& set = sets[static_cast<std::size_t>(b.z - 1)];
      const ArgMax old = best_alpha(set, b.probs.data(), cells);
      const Action a = backup.run(b, alpha, from);
      const double v = dot(alpha.data(), b.probs.data(), cells);
      if (v > old.value) {
        improvement = std::max(improvement, v - old.value);
        set.add(a, alpha.data(), cells, from);
      }
    }
    if (timed_out && local.sweeps == 0) {
      throw SolverError("time budget exhausted before the first backup sweep completed (" +
                        std::to_string(pts.size()) + " belief points sampled)");
    }
    prune(sets, pts, cells);
    if (timed_out) break;
    ++local.sweeps;
    ++round_sweeps;
    local.last_improvement = improvement;
    local.initial_value_history.push_back(initial_value());
    const bool settled = improvement < cfg.epsilon;
    if (!exhausted && points.size() < max_points &&
        (settled || round_sweeps >= kRoundSweeps)) {
      // Grow the set along trajectories of the current lower-bound policy.
      round_sweeps = 0;
      const std::size_t before = points.size();
      seed_points(model, points, std::min(max_points, before + max_points / kBatches),
                  4 * n, rng, [&](const Belief& b, const RelState&) {
                    if (uniform01(rng) < kExplore) return random_action();
                    const ArgMax m = best_alpha(sets[static_cast<std::size_t>(b.z - 1)],
                                                b.probs.data(), cells);
                    return sets[static_cast<std::size_t>(b.z - 1)]
                        .actions[static_cast<std::size_t>(m.index)];
                  });
      if (points.size() > before) continue;
      exhausted = true;  // reachable beliefs are all sampled
    }
    if (settled) {
      local.converged = true;
      break;
    }
  }
  local.points = static_cast<int>(points.size());

  Policy pol{model.params(), model.digest(), PolicyKind::pbvi, {}};
  pol.slices.resize(static_cast<std::size_t>(n));
  for (int z = 1; z <= n; ++z) {
    const SliceSet& set = sets[static_cast<std::size_t>(z - 1)];
    for (std::size_t k = 0; k < set.size(); ++k) {
      const double* w = set.row(k, cells);
      pol.slices[static_cast<std::size_t>(z - 1)].push_back(
          {set.actions[k], z, std::vector<double>(w, w + cells)});
    }
  }
  local.alphas = pol.alpha_count();
  local.seconds = std::chrono::duration<double>(Clock::now() - started).count();
  if (stats != nullptr) *stats = std::move(local);
  return pol;
}

void check_digest(const Policy& pol, const Model& model) {
  if (pol.digest != model.digest()) {
    throw DigestMismatchError("policy digest " + pol.digest +
                              " does not match model digest " + model.digest());
  }
}

namespace {

struct SliceChoice {
  Action action = Action::look;
  double value = -std::numeric_limits<double>::infinity();
};

SliceChoice evaluate_slice(const Policy& pol, const Model& model, const Belief& b) {
  check_digest(pol, model);
  if (b.n != model.n() || b.z < 1 || b.z > model.n() ||
      b.probs.size() != static_cast<std::size_t>(model.cells()) ||
      pol.slices.size() != static_cast<std::size_t>(model.n())) {
    throw DomainError("belief does not match policy model");
  }
  SliceChoice best;
  for (const AlphaVector& alpha : pol.slices[static_cast<std::size_t>(b.z - 1)]) {
    const double v = dot(alpha.weights.data(), b.probs.data(), model.cells());
    if (v > best.value || (v == best.value && index_of(alpha.action) < index_of(best.action))) {
      best = {alpha.action, v};
    }
  }
  return best;
}

}  // namespace

Action policy_action(const Policy& pol, const Model& model, const Belief& b) {
  return evaluate_slice(pol, model, b).action;
}

double policy_value(const Policy& pol, const Model& model, const Belief& b) {
  return evaluate_slice(pol, model, b).value;
}

}  // namespace relsearch
