// Brute-force Bayes filter over the absolute joint state (drone x, y, z and
// target x, y), written from the model definition without using the
// library's transition or observation code. Used to cross-check the
// relative-offset filter.
//
// The drone's horizontal range follows the relative-grid bound convention:
// the offset drone - target stays within [-(n-1), n-1] per axis, so drone
// coordinates may leave [1, n] while the offset is legal.

#ifndef RELSEARCH_TESTS_ORACLE_FILTER_HPP_
#define RELSEARCH_TESTS_ORACLE_FILTER_HPP_

#include <cmath>
#include <cstdlib>
#include <map>
#include <vector>

namespace oracle {

struct Joint {
  int dx, dy, dz;  // drone, absolute
  int tx, ty;      // target, absolute; target altitude is 1
};

// Motion codes: 0 east, 1 west, 2 north, 3 south, 4 ascend, 5 descend, 6 look.
inline void step_of(int action, int& mx, int& my, int& mz) {
  static const int kD[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, 1, 0},
                               {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  mx = kD[action][0];
  my = kD[action][1];
  mz = kD[action][2];
}

class JointFilter {
 public:
  JointFilter(int n, double trans, double obs_base, int z0)
      : n_(n), trans_(trans), obs_base_(obs_base), z_(z0) {
    // Uniform target position times uniform legal offset.
    for (int tx = 1; tx <= n; ++tx) {
      for (int ty = 1; ty <= n; ++ty) {
        for (int ox = -(n - 1); ox <= n - 1; ++ox) {
          for (int oy = -(n - 1); oy <= n - 1; ++oy) {
            mass_[key({tx + ox, ty + oy, z0, tx, ty})] = 1.0;
          }
        }
      }
    }
    normalize();
  }

  // Predict with `action`, keep only the successors at altitude `new_z`,
  // then weight by the observation likelihood. obs: 0 seen, 1 not seen,
  // 2 none.
  void update(int action, int obs, int new_z) {
    std::map<long, double> next;
    for (const auto& [k, p] : mass_) {
      const Joint s = unkey(k);
      if (is_target(s) || action == 6) {
        add(next, s, p);
        continue;
      }
      for (int m = 0; m < 6; ++m) {
        const double q = m == action ? trans_ : (1.0 - trans_) / 5.0;
        if (q == 0.0) continue;
        int mx, my, mz;
        step_of(m, mx, my, mz);
        Joint t{s.dx + mx, s.dy + my, s.dz + mz, s.tx, s.ty};
        if (!legal(t)) t = s;
        add(next, t, p * q);
      }
    }
    mass_.clear();
    for (const auto& [k, p] : next) {
      const Joint s = unkey(k);
      if (s.dz != new_z) continue;
      const double w = p * likelihood(s, action, obs);
      if (w > 0.0) mass_[k] = w;
    }
    z_ = new_z;
    normalize();
  }

  // Marginal over relative offsets, indexed like the library's cells.
  std::vector<double> relative_marginal() const {
    const int side = 2 * n_ - 1;
    std::vector<double> out(static_cast<std::size_t>(side * side), 0.0);
    for (const auto& [k, p] : mass_) {
      const Joint s = unkey(k);
      const int xr = s.dx - s.tx + n_;
      const int yr = s.dy - s.ty + n_;
      out[static_cast<std::size_t>((yr - 1) * side + (xr - 1))] += p;
    }
    return out;
  }

  int z() const { return z_; }
  bool empty() const { return mass_.empty(); }

  // Samples from the oracle's own model: successor and observation for a
  // given true joint state. u1/u2 are uniforms in [0, 1).
  Joint sample_next(const Joint& s, int action, double u1) const {
    if (is_target(s) || action == 6) return s;
    for (int m = 0; m < 6; ++m) {
      const double q = m == action ? trans_ : (1.0 - trans_) / 5.0;
      if (u1 < q) {
        int mx, my, mz;
        step_of(m, mx, my, mz);
        Joint t{s.dx + mx, s.dy + my, s.dz + mz, s.tx, s.ty};
        return legal(t) ? t : s;
      }
      u1 -= q;
    }
    return s;
  }
  int sample_obs(const Joint& s, int action, double u2) const {
    if (action != 6) return 2;
    return u2 < likelihood(s, action, 0) ? 0 : 1;
  }

  double accuracy(int z) const { return (1.0 + std::pow(obs_base_, z - 1)) / 2.0; }

  double likelihood(const Joint& s, int action, int obs) const {
    if (action != 6) return obs == 2 ? 1.0 : 0.0;
    if (obs == 2) return 0.0;
    const bool visible = std::abs(s.dx - s.tx) <= s.dz - 1 && std::abs(s.dy - s.ty) <= s.dz - 1;
    const double a = accuracy(s.dz);
    return (obs == 0) == visible ? a : 1.0 - a;
  }

  bool is_target(const Joint& s) const { return s.dx == s.tx && s.dy == s.ty && s.dz == 1; }

 private:
  bool legal(const Joint& s) const {
    return std::abs(s.dx - s.tx) <= n_ - 1 && std::abs(s.dy - s.ty) <= n_ - 1 && s.dz >= 1 &&
           s.dz <= n_;
  }
  long key(const Joint& s) const {
    const long span = 4L * n_;
    return ((((s.dx + span) * (4 * span) + (s.dy + span)) * (4 * span) + s.dz) * (4 * span) +
            s.tx) * (4 * span) + s.ty;
  }
  Joint unkey(long k) const {
    const long span = 4L * n_;
    const long base = 4 * span;
    Joint s{};
    s.ty = static_cast<int>(k % base);
    k /= base;
    s.tx = static_cast<int>(k % base);
    k /= base;
    s.dz = static_cast<int>(k % base);
    k /= base;
    s.dy = static_cast<int>(k % base - span);
    k /= base;
    s.dx = static_cast<int>(k - span);
    return s;
  }
  void add(std::map<long, double>& m, const Joint& s, double p) const { m[key(s)] += p; }
  void normalize() {
    double total = 0.0;
    for (const auto& [k, p] : mass_) total += p;
    if (total <= 0.0) return;
    for (auto& [k, p] : mass_) p /= total;
  }

  int n_;
  double trans_;
  double obs_base_;
  int z_;
  std::map<long, double> mass_;
};

}  // namespace oracle

#endif  // RELSEARCH_TESTS_ORACLE_FILTER_HPP_
