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

#include "relsearch/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "relsearch/error.hpp"
#include "relsearch/sim.hpp"

namespace relsearch {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Policy solve_cell(const Model& model, const SweepSpec& spec) {
  std::optional<std::filesystem::path> cached;
  if (spec.cache_dir) {
    cached = *spec.cache_dir / (model.digest() + ".policy");
    if (std::filesystem::exists(*cached)) {
      Policy pol = load_policy(*cached);
      if (pol.digest == model.digest() && pol.kind == PolicyKind::pbvi) return pol;
    }
  }
  Policy pol = solve_pbvi(model, spec.solver_cfg);
  if (cached) {
    std::filesystem::create_directories(*spec.cache_dir);
    save_policy(pol, *cached);
  }
  return pol;
}

}  // namespace

std::string_view to_string(SweepPolicy p) {
  switch (p) {
    case SweepPolicy::pomdp: return "pomdp";
    case SweepPolicy::heuristic: return "heuristic";
    case SweepPolicy::random: return "random";
  }
  return "pomdp";
}

std::optional<SweepPolicy> parse_sweep_policy(std::string_view token) {
  for (auto p : {SweepPolicy::pomdp, SweepPolicy::heuristic, SweepPolicy::random}) {
    if (to_string(p) == token) return p;
  }
  return std::nullopt;
}

void validate(const SweepSpec& spec) {
  if (spec.trans_values.empty() || spec.obs_values.empty() || spec.reward_values.empty() ||
      spec.policies.empty()) {
    throw DomainError("sweep lists must be non-empty");
  }
  for (double t : spec.trans_values) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("sweep trans value outside [0, 1]");
  }
  for (double o : spec.obs_values) {
    if (!(o >= 0.0 && o <= 1.0)) throw DomainError("sweep obs value outside [0, 1]");
  }
  if (spec.episodes < 1) throw DomainError("sweep episodes must be >= 1");
}

std::vector<SweepRecord> run_sweep(const SweepSpec& spec) {
  validate(spec);
  std::vector<SweepRecord> records;
  records.reserve(spec.trans_values.size() * spec.obs_values.size() *
                  spec.reward_values.size() * spec.policies.size());
  const bool wants_pomdp = std::find(spec.policies.begin(), spec.policies.end(),
                                     SweepPolicy::pomdp) != spec.policies.end();
  for (double reward_value : spec.reward_values) {
    for (double trans : spec.trans_values) {
      for (double obs : spec.obs_values) {
        const ModelParams params{spec.n, trans, obs, reward_value, spec.reward_oob,
                                 spec.discount};
        std::optional<Model> model;
        std::string cell_error;
        try {
          model.emplace(params);
        } catch (const Error& e) {
          cell_error = e.what();
        }
        std::optional<Policy> policy;
        double solve_seconds = 0.0;
        std::string solve_error;
        if (model && wants_pomdp) {
          const auto t0 = std::chrono::steady_clock::now();
          try {
            policy = solve_cell(*model, spec);
          } catch (const Error& e) {
            solve_error = e.what();
          }
          if (spec.record_timing) {
            solve_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          }
        }
        for (SweepPolicy which : spec.policies) {
          SweepRecord rec{trans, obs, reward_value, which, kNaN, kNaN, kNaN, kNaN, 0.0, {}};
          std::string err = cell_error;
          if (err.empty() && which == SweepPolicy::pomdp) {
            err = solve_error;
            rec.solve_seconds = solve_seconds;
          }
          if (err.empty()) {
            Agent agent = which == SweepPolicy::pomdp
                              ? Agent{std::cref(*policy)}
                              : Agent{which == SweepPolicy::heuristic ? Baseline::heuristic
                                                                      : Baseline::random};
            const EvalSummary s = evaluate(agent, *model, spec.episodes, spec.base_seed, spec.cap);
            rec.mean_steps = s.mean_steps;
            rec.mean_reward = s.mean_reward;
            rec.ci95_steps = s.ci95_steps;
            rec.look_proportion = s.look_proportion;
          } else {
            rec.error = err;
          }
          records.push_back(std::move(rec));
        }
      }
    }
  }
  return records;
}

void write_csv(const std::vector<SweepRecord>& records, std::ostream& os) {
  os << kCsvHeader << '\n';
  for (const SweepRecord& r : records) {
    os << g6(r.trans) << ',' << g6(r.obs) << ',' << g6(r.reward_magnitude) << ','
       << to_string(r.policy) << ',' << g6(r.mean_steps) << ',' << g6(r.mean_reward) << ','
       << g6(r.ci95_steps) << ',' << g6(r.look_proportion) << ',' << g6(r.solve_seconds)
       << '\n';
  }
}

void write_csv(const std::vector<SweepRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_csv(records, out);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<SweepRecord> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) {
    throw ParseError("csv line 1: unexpected header");
  }
  std::vector<SweepRecord> records;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.size() != 9) {
      throw ParseError("csv line " + std::to_string(line_no) + ": expected 9 columns");
    }
    auto num = [&](const std::string& text) {
      char* end = nullptr;
      const double v = std::strtod(text.c_str(), &end);
      if (end == text.c_str() || *end != '\0') {
        throw ParseError("csv line " + std::to_string(line_no) + ": bad number '" + text + "'");
      }
      return v;
    };
    const auto policy = parse_sweep_policy(cols[3]);
    if (!policy) throw ParseError("csv line " + std::to_string(line_no) + ": bad policy");
    records.push_back({num(cols[0]), num(cols[1]), num(cols[2]), *policy, num(cols[4]),
                       num(cols[5]), num(cols[6]), num(cols[7]), num(cols[8]), {}});
  }
  return records;
}

std::vector<SweepRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_csv(in);
}

std::string_view to_string(SweepMetric m) {
  switch (m) {
    case SweepMetric::mean_steps: return "mean_steps";
    case SweepMetric::mean_reward: return "mean_reward";
    case SweepMetric::ci95_steps: return "ci95_steps";
    case SweepMetric::look_proportion: return "look_proportion";
  }
  return "mean_steps";
}

std::optional<SweepMetric> parse_sweep_metric(std::string_view token) {
  for (auto m : {SweepMetric::mean_steps, SweepMetric::mean_reward, SweepMetric::ci95_steps,
                 SweepMetric::look_proportion}) {
    if (to_string(m) == token) return m;
  }
  return std::nullopt;
}

double metric_value(const SweepRecord& r, SweepMetric m) {
  switch (m) {
    case SweepMetric::mean_steps: return r.mean_steps;
    case SweepMetric::mean_reward: return r.mean_reward;
    case SweepMetric::ci95_steps: return r.ci95_steps;
    case SweepMetric::look_proportion: return r.look_proportion;
  }
  return kNaN;
}

void write_heatmap_svg(const std::vector<SweepRecord>& records, SweepPolicy policy,
                       SweepMetric metric, std::ostream& os) {
  std::vector<const SweepRecord*> rows;
  double reward_value = std::numeric_limits<double>::infinity();
  for (const SweepRecord& r : records) {
    if (r.policy == policy) reward_value = std::min(reward_value, r.reward_magnitude);
  }
  for (const SweepRecord& r : records) {
    if (r.policy == policy && r.reward_magnitude == reward_value) rows.push_back(&r);
  }
  if (rows.empty()) {
    throw DomainError("heatmap: no records for policy " + std::string(to_string(policy)));
  }
  std::vector<double> trans;
  std::vector<double> obs;
  for (const SweepRecord* r : rows) {
    trans.push_back(r->trans);
    obs.push_back(r->obs);
  }
  for (auto* axis : {&trans, &obs}) {
    std::sort(axis->begin(), axis->end());
    axis->erase(std::unique(axis->begin(), axis->end()), axis->end());
  }
  std::map<std::pair<double, double>, double> grid;
  for (const SweepRecord* r : rows) grid[{r->trans, r->obs}] = metric_value(*r, metric);
  std::string missing;
  for (double t : trans) {
    for (double o : obs) {
      if (!grid.count({t, o})) missing += " (trans=" + g6(t) + ", obs=" + g6(o) + ")";
    }
  }
  if (!missing.empty()) throw DomainError("heatmap: missing cells" + missing);

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& [key, v] : grid) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo)) lo = hi = 0.0;

  // Low values dark, high values light.
  auto colour = [&](double v) {
    if (!std::isfinite(v)) return std::string("#cccccc");
    const double u = hi > lo ? (v - lo) / (hi - lo) : 0.0;
    const int r = static_cast<int>(std::lround(8 + u * (247 - 8)));
    const int g = static_cast<int>(std::lround(48 + u * (251 - 48)));
    const int b = static_cast<int>(std::lround(107 + u * (255 - 107)));
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return std::string(buf);
  };

  const int cell = 64;
  const int left = 90;
  const int top = 50;
  const int width = left + cell * static_cast<int>(obs.size()) + 20;
  const int height = top + cell * static_cast<int>(trans.size()) + 70;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<text x=\"" << left << "\" y=\"20\" font-size=\"14\">" << to_string(policy) << ' '
     << to_string(metric) << " (reward " << g6(reward_value) << ")</text>\n";
  os << "<text x=\"" << left << "\" y=\"38\">min=" << g6(lo) << " max=" << g6(hi)
     << "</text>\n";
  // Highest transition probability on the top row.
  for (std::size_t i = 0; i < trans.size(); ++i) {
    const int y = top + cell * static_cast<int>(trans.size() - 1 - i);
    for (std::size_t j = 0; j < obs.size(); ++j) {
      const int x = left + cell * static_cast<int>(j);
      const double v = grid.at({trans[i], obs[j]});
      os << "<rect class=\"cell\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell
         << "\" height=\"" << cell << "\" fill=\"" << colour(v) << "\" data-trans=\""
         << g6(trans[i]) << "\" data-obs=\"" << g6(obs[j]) << "\" data-value=\"" << g6(v)
         << "\"/>\n";
    }
    os << "<text class=\"ylabel\" x=\"" << left - 8 << "\" y=\"" << y + cell / 2 + 4
       << "\" text-anchor=\"end\">" << g6(trans[i]) << "</text>\n";
  }
  const int axis_y = top + cell * static_cast<int>(trans.size());
  for (std::size_t j = 0; j < obs.size(); ++j) {
    os << "<text class=\"xlabel\" x=\"" << left + cell * static_cast<int>(j) + cell / 2
       << "\" y=\"" << axis_y + 16 << "\" text-anchor=\"middle\">" << g6(obs[j]) << "</text>\n";
  }
  os << "<text x=\"" << left + cell * static_cast<int>(obs.size()) / 2 << "\" y=\"" << axis_y + 40
     << "\" text-anchor=\"middle\">observation accuracy</text>\n";
  os << "<text x=\"16\" y=\"" << top + cell * static_cast<int>(trans.size()) / 2
     << "\" transform=\"rotate(-90 16 " << top + cell * static_cast<int>(trans.size()) / 2
     << ")\" text-anchor=\"middle\">transition probability</text>\n";
  os << "</svg>\n";
}

void write_heatmap_svg(const std::vector<SweepRecord>& records, SweepPolicy policy,
                       SweepMetric metric, const std::filesystem::path& path) {
  std::ostringstream svg;
  write_heatmap_svg(records, policy, metric, svg);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << svg.str();
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace relsearch
