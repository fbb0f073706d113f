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

#include <charconv>
#include <fstream>
#include <sstream>

#include "relsearch/error.hpp"
#include "relsearch/solver.hpp"

namespace relsearch {

namespace {

constexpr std::string_view kMagic = "RELSEARCH-POLICY v1";

template <typename T>
T parse_number(std::string_view text, int line, std::string_view what) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError("policy line " + std::to_string(line) + ": bad " +
                     std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

// Splits "key=value" tokens and checks that keys arrive in `keys` order.
std::vector<std::string> keyed_fields(const std::string& text, int line,
                                      std::initializer_list<std::string_view> keys) {
  std::istringstream in(text);
  std::vector<std::string> values;
  std::string token;
  auto key = keys.begin();
  while (in >> token) {
    const auto eq = token.find('=');
    if (key == keys.end() || eq == std::string::npos ||
        std::string_view(token).substr(0, eq) != *key) {
      throw ParseError("policy line " + std::to_string(line) +
                       ": unexpected field '" + token + "'");
    }
    values.push_back(token.substr(eq + 1));
    ++key;
  }
  if (key != keys.end()) {
    throw ParseError("policy line " + std::to_string(line) + ": missing field '" +
                     std::string(*key) + "'");
  }
  return values;
}

}  // namespace

void save_policy(const Policy& pol, std::ostream& os) {
  os << kMagic << '\n'
     << params_to_string(pol.params) << " kind=" << to_string(pol.kind)
     << " digest=" << pol.digest << '\n';
  for (const auto& slice : pol.slices) {
    for (const AlphaVector& alpha : slice) {
      os << "alpha z=" << alpha.z << " action=" << to_string(alpha.action) << '\n';
      for (std::size_t i = 0; i < alpha.weights.size(); ++i) {
        if (i > 0) os << ' ';
        os << format_double(alpha.weights[i]);
      }
      os << '\n';
    }
  }
}

void save_policy(const Policy& pol, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  save_policy(pol, out);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

Policy load_policy(std::istream& is) {
  std::string line;
  int line_no = 1;
  if (!std::getline(is, line) || line != kMagic) {
    throw ParseError("policy line 1: missing '" + std::string(kMagic) + "' header");
  }
  ++line_no;
  if (!std::getline(is, line)) throw ParseError("policy line 2: missing parameter line");
  const auto f = keyed_fields(line, line_no,
                              {"n", "trans", "obs", "r0", "r1", "gamma", "kind", "digest"});
  Policy pol;
  pol.params.n = parse_number<int>(f[0], line_no, "n");
  pol.params.trans_prob = parse_number<double>(f[1], line_no, "trans");
  pol.params.obs_base = parse_number<double>(f[2], line_no, "obs");
  pol.params.reward_target = parse_number<double>(f[3], line_no, "r0");
  pol.params.reward_oob = parse_number<double>(f[4], line_no, "r1");
  pol.params.discount = parse_number<double>(f[5], line_no, "gamma");
  const auto kind = parse_policy_kind(f[6]);
  if (!kind) throw ParseError("policy line 2: unknown kind '" + f[6] + "'");
  pol.kind = *kind;
  pol.digest = f[7];
  try {
    validate(pol.params);
  } catch (const DomainError& e) {
    throw ParseError(std::string("policy line 2: ") + e.what());
  }
  if (pol.digest.empty() || pol.digest != params_digest(pol.params)) {
    throw ParseError("policy line 2: digest does not match parameters");
  }

  const int n = pol.params.n;
  const auto cells = static_cast<std::size_t>(num_cells(n));
  pol.slices.resize(static_cast<std::size_t>(n));
  int last_z = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("alpha ", 0) != 0) {
      throw ParseError("policy line " + std::to_string(line_no) + ": expected 'alpha'");
    }
    const auto g = keyed_fields(line.substr(6), line_no, {"z", "action"});
    AlphaVector alpha;
    alpha.z = parse_number<int>(g[0], line_no, "z");
    if (alpha.z < 1 || alpha.z > n || alpha.z < last_z) {
      throw ParseError("policy line " + std::to_string(line_no) + ": bad slice z");
    }
    last_z = alpha.z;
    const auto action = parse_action(g[1]);
    if (!action) {
      throw ParseError("policy line " + std::to_string(line_no) + ": unknown action");
    }
    alpha.action = *action;
    ++line_no;
    if (!std::getline(is, line)) {
      throw ParseError("policy line " + std::to_string(line_no) + ": missing weights");
    }
    std::istringstream in(line);
    std::string tok;
    alpha.weights.reserve(cells);
    while (in >> tok) alpha.weights.push_back(parse_number<double>(tok, line_no, "weight"));
    if (alpha.weights.size() != cells) {
      throw ParseError("policy line " + std::to_string(line_no) + ": expected " +
                       std::to_string(cells) + " weights");
    }
    pol.slices[static_cast<std::size_t>(alpha.z - 1)].push_back(std::move(alpha));
  }
  for (std::size_t z = 0; z < pol.slices.size(); ++z) {
    if (pol.slices[z].empty()) {
      throw ParseError("policy has no alpha vector for z=" + std::to_string(z + 1));
    }
  }
  return pol;
}

Policy load_policy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open policy file " + path.string());
  return load_policy(in);
}

}  // namespace relsearch
