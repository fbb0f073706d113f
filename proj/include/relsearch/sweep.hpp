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

#ifndef RELSEARCH_SWEEP_HPP_
#define RELSEARCH_SWEEP_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relsearch/solver.hpp"

namespace relsearch {

enum class SweepPolicy : std::uint8_t { pomdp, heuristic, random };

std::string_view to_string(SweepPolicy p);
std::optional<SweepPolicy> parse_sweep_policy(std::string_view token);

struct SweepSpec {
  std::vector<double> trans_values{0.76, 0.82, 0.88, 0.94, 1.0};
  std::vector<double> obs_values{0.76, 0.82, 0.88, 0.94, 1.0};
  std::vector<double> reward_values{10.0, 100.0, 1000.0};
  std::vector<SweepPolicy> policies{SweepPolicy::pomdp, SweepPolicy::heuristic,
                                    SweepPolicy::random};
  int episodes = 1000;
  SolverConfig solver_cfg;
  int n = 7;
  std::uint64_t base_seed = 0;
  double reward_oob = -1.0;
  double discount = 0.95;
  int cap = 500;
  // Solved policies are cached here as <digest>.policy when set.
  std::optional<std::filesystem::path> cache_dir;
  // Wall-clock solve times make the output machine-dependent, so they are
  // only recorded on request; otherwise solve_seconds is 0.
  bool record_timing = false;
};

void validate(const SweepSpec& spec);

struct SweepRecord {
  double trans = 0.0;
  double obs = 0.0;
  double reward_magnitude = 0.0;
  SweepPolicy policy = SweepPolicy::pomdp;
  double mean_steps = 0.0;
  double mean_reward = 0.0;
  double ci95_steps = 0.0;
  double look_proportion = 0.0;
  double solve_seconds = 0.0;
  std::string error;  // non-empty when the cell's solve failed

  bool operator==(const SweepRecord&) const = default;
};

// Rows ordered reward, then trans, then obs, then policy (spec list order).
std::vector<SweepRecord> run_sweep(const SweepSpec& spec);

inline constexpr std::string_view kCsvHeader =
    "trans,obs,reward,policy,mean_steps,mean_reward,ci95_steps,look_proportion,solve_seconds";

void write_csv(const std::vector<SweepRecord>& records, std::ostream& os);
void write_csv(const std::vector<SweepRecord>& records, const std::filesystem::path& path);
std::vector<SweepRecord> read_csv(std::istream& is);
std::vector<SweepRecord> read_csv(const std::filesystem::path& path);

enum class SweepMetric : std::uint8_t { mean_steps, mean_reward, ci95_steps, look_proportion };

std::string_view to_string(SweepMetric m);
std::optional<SweepMetric> parse_sweep_metric(std::string_view token);
double metric_value(const SweepRecord& r, SweepMetric m);

// Trans on the Y axis, obs on the X axis. Throws DomainError naming the
// missing cells when the records do not cover a full grid for `policy`.
// When several reward magnitudes are present the smallest one is drawn.
void write_heatmap_svg(const std::vector<SweepRecord>& records, SweepPolicy policy,
                       SweepMetric metric, std::ostream& os);
void write_heatmap_svg(const std::vector<SweepRecord>& records, SweepPolicy policy,
                       SweepMetric metric, const std::filesystem::path& path);

}  // namespace relsearch

#endif  // RELSEARCH_SWEEP_HPP_
