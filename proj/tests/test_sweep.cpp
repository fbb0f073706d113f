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
#include <filesystem>
#include <sstream>
#include <string>

#include "doctest.h"
#include "relsearch/error.hpp"
#include "relsearch/sweep.hpp"

using namespace relsearch;
namespace fs = std::filesystem;

namespace {

SweepSpec tiny() {
  SweepSpec s;
  s.n = 3;
  s.trans_values = {0.88, 1.0};
  s.obs_values = {0.76, 1.0};
  s.reward_values = {10.0};
  s.episodes = 20;
  s.cap = 200;
  s.solver_cfg.max_points = 120;
  s.solver_cfg.seed = 3;
  return s;
}

const std::vector<SweepRecord>& tiny_records() {
  static const std::vector<SweepRecord> records = run_sweep(tiny());
  return records;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t hits = 0;
  for (std::size_t pos = 0; (pos = text.find(needle, pos)) != std::string::npos; ++pos) ++hits;
  return hits;
}

}  // namespace

TEST_SUITE("sweep") {
  TEST_CASE("default grid size") {
    const SweepSpec s;
    CHECK(s.trans_values.size() * s.obs_values.size() * s.reward_values.size() *
              s.policies.size() ==
          225);
  }

  TEST_CASE("rows follow reward, trans, obs, policy order") {
    const auto& recs = tiny_records();
    REQUIRE(recs.size() == 12);
    const SweepSpec s = tiny();
    std::size_t i = 0;
    for (double t : s.trans_values) {
      for (double o : s.obs_values) {
        for (SweepPolicy p : s.policies) {
          CHECK(recs[i].trans == t);
          CHECK(recs[i].obs == o);
          CHECK(recs[i].reward_magnitude == 10.0);
          CHECK(recs[i].policy == p);
          CHECK(recs[i].error.empty());
          CHECK(std::isfinite(recs[i].mean_steps));
          CHECK(recs[i].solve_seconds == 0.0);
          if (p == SweepPolicy::random) CHECK(recs[i].look_proportion == 0.0);
          ++i;
        }
      }
    }
  }

  TEST_CASE("sweeps are deterministic") {
    CHECK(run_sweep(tiny()) == tiny_records());
  }

  TEST_CASE("policy cache is reused") {
    const fs::path dir = fs::temp_directory_path() / "relsearch_sweep_cache";
    fs::remove_all(dir);
    SweepSpec s = tiny();
    s.policies = {SweepPolicy::pomdp};
    s.cache_dir = dir;
    const auto first = run_sweep(s);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
      CHECK(entry.path().extension() == ".policy");
      ++files;
    }
    CHECK(files == 4);
    CHECK(run_sweep(s) == first);
    fs::remove_all(dir);
  }

  TEST_CASE("invalid specs are rejected") {
    SweepSpec s = tiny();
    s.trans_values.clear();
    CHECK_THROWS_AS(run_sweep(s), DomainError);
    s = tiny();
    s.obs_values = {1.2};
    CHECK_THROWS_AS(run_sweep(s), DomainError);
    s = tiny();
    s.episodes = 0;
    CHECK_THROWS_AS(run_sweep(s), DomainError);
  }

  TEST_CASE("a cell with invalid model parameters records an error") {
    SweepSpec s = tiny();
    s.trans_values = {0.88};
    s.obs_values = {1.0};
    s.discount = 1.5;
    s.policies = {SweepPolicy::pomdp, SweepPolicy::random};
    const auto recs = run_sweep(s);
    REQUIRE(recs.size() == 2);
    for (const SweepRecord& r : recs) {
      CHECK_FALSE(r.error.empty());
      CHECK(std::isnan(r.mean_steps));
    }
  }

  TEST_CASE("csv round trip") {
    const auto& recs = tiny_records();
    std::ostringstream os;
    write_csv(recs, os);
    const std::string text = os.str();
    CHECK(text.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
    CHECK(count(text, "\n") == recs.size() + 1);
    std::istringstream is(text);
    const auto back = read_csv(is);
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
      CHECK(back[i].trans == recs[i].trans);
      CHECK(back[i].obs == recs[i].obs);
      CHECK(back[i].policy == recs[i].policy);
      CHECK(back[i].mean_steps == doctest::Approx(recs[i].mean_steps).epsilon(1e-5));
      CHECK(back[i].mean_reward == doctest::Approx(recs[i].mean_reward).epsilon(1e-5));
    }
  }

  TEST_CASE("csv with only a header") {
    std::ostringstream os;
    write_csv({}, os);
    CHECK(os.str() == std::string(kCsvHeader) + "\n");
    std::istringstream is(os.str());
    CHECK(read_csv(is).empty());
  }

  TEST_CASE("malformed csv") {
    std::istringstream bad_header("trans,obs\n");
    CHECK_THROWS_AS(read_csv(bad_header), ParseError);
    std::istringstream short_row(std::string(kCsvHeader) + "\n0.88,1,10,pomdp\n");
    CHECK_THROWS_AS(read_csv(short_row), ParseError);
    std::istringstream bad_policy(std::string(kCsvHeader) + "\n0.88,1,10,qmdp,1,1,1,1,0\n");
    CHECK_THROWS_AS(read_csv(bad_policy), ParseError);
    CHECK_THROWS_AS(read_csv(fs::path("/nonexistent/sweep.csv")), IoError);
  }

  TEST_CASE("heatmap covers the grid") {
    std::vector<SweepRecord> recs;
    const double axis[] = {0.76, 0.82, 0.88, 0.94, 1.0};
    for (double t : axis) {
      for (double o : axis) {
        SweepRecord r;
        r.trans = t;
        r.obs = o;
        r.reward_magnitude = 10.0;
        r.policy = SweepPolicy::heuristic;
        r.mean_steps = 100.0 * t + o;
        recs.push_back(r);
      }
    }
    std::ostringstream svg;
    write_heatmap_svg(recs, SweepPolicy::heuristic, SweepMetric::mean_steps, svg);
    CHECK(count(svg.str(), "class=\"cell\"") == 25);
    CHECK(svg.str().find("<svg") == 0);
    CHECK_THROWS_AS(write_heatmap_svg(recs, SweepPolicy::pomdp, SweepMetric::mean_steps, svg),
                    DomainError);

    recs.erase(recs.begin() + 7);
    try {
      std::ostringstream partial;
      write_heatmap_svg(recs, SweepPolicy::heuristic, SweepMetric::mean_steps, partial);
      FAIL("missing cell accepted");
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()).find("trans=0.82, obs=0.88") != std::string::npos);
    }
  }

  TEST_CASE("a flat metric draws one colour") {
    std::vector<SweepRecord> recs;
    for (double t : {0.5, 1.0}) {
      for (double o : {0.5, 1.0}) {
        SweepRecord r;
        r.trans = t;
        r.obs = o;
        r.policy = SweepPolicy::random;
        r.look_proportion = 0.0;
        recs.push_back(r);
      }
    }
    std::ostringstream svg;
    write_heatmap_svg(recs, SweepPolicy::random, SweepMetric::look_proportion, svg);
    const std::string text = svg.str();
    const auto first = text.find("fill=\"#");
    REQUIRE(first != std::string::npos);
    CHECK(count(text, text.substr(first, 14)) == 4);
  }

  TEST_CASE("names parse back") {
    for (auto p : {SweepPolicy::pomdp, SweepPolicy::heuristic, SweepPolicy::random}) {
      CHECK(parse_sweep_policy(to_string(p)) == p);
    }
    for (auto m : {SweepMetric::mean_steps, SweepMetric::mean_reward, SweepMetric::ci95_steps,
                   SweepMetric::look_proportion}) {
      CHECK(parse_sweep_metric(to_string(m)) == m);
    }
    CHECK_FALSE(parse_sweep_policy("qmdp").has_value());
  }
}
