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

#include "relsearch/flight.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <deque>
#include <fstream>
#include <ostream>
#include <thread>

#include "relsearch/error.hpp"

namespace relsearch {

namespace {

constexpr double kDoneMass = 1.0 - 1e-9;

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t secs = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(ms));
  return buf;
}

// Reads whole lines appended since the last call.
class LinkReader {
 public:
  explicit LinkReader(std::filesystem::path path) : path_(std::move(path)) {}

  void poll(std::deque<std::string>& out) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) return;
    in.seekg(static_cast<std::streamoff>(offset_));
    std::string chunk((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    offset_ += chunk.size();
    partial_ += chunk;
    std::size_t start = 0;
    for (std::size_t nl; (nl = partial_.find('\n', start)) != std::string::npos; start = nl + 1) {
      std::string line = partial_.substr(start, nl - start);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      out.push_back(std::move(line));
    }
    partial_.erase(0, start);
  }

 private:
  std::filesystem::path path_;
  std::size_t offset_ = 0;
  std::string partial_;
};

void append_line(const std::filesystem::path& path, const std::string& line) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot append to link file " + path.string());
  out << line << '\n';
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

LinkMessage observation_message(ObsSymbol o, int z) {
  return {LinkMessage::Tag::observation, o, z, std::nullopt};
}

LinkMessage action_message(std::optional<Action> a) {
  return {LinkMessage::Tag::action, ObsSymbol::none, 0, a};
}

LinkMessage parse_link_line(std::string_view line, int line_no) {
  auto fail = [&](const std::string& why) -> LinkMessage {
    throw ProtocolError(line_no, why + ": '" + std::string(line) + "'");
  };
  if (line.size() < 3 || line[1] != ' ') return fail("malformed line");
  const std::string_view rest = line.substr(2);
  if (line[0] == 'A') {
    if (rest == "done") return action_message(std::nullopt);
    const auto a = parse_action(rest);
    if (!a) return fail("unknown action");
    return action_message(*a);
  }
  if (line[0] != 'O') return fail("unknown tag");
  const auto space = rest.find(' ');
  if (space == std::string_view::npos) return fail("missing Z field");
  const auto obs = parse_obs(rest.substr(0, space));
  if (!obs) return fail("unknown observation");
  const std::string_view field = rest.substr(space + 1);
  if (field.size() < 3 || field.substr(0, 2) != "Z=") return fail("missing Z field");
  int z = 0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data() + 2, end, z);
  if (ec != std::errc{} || ptr != end) return fail("bad Z field");
  return observation_message(*obs, z);
}

std::string format_link_line(const LinkMessage& msg) {
  if (msg.tag == LinkMessage::Tag::action) {
    return "A " + std::string(msg.action ? to_string(*msg.action) : "done");
  }
  return "O " + std::string(to_string(msg.obs)) + " Z=" + std::to_string(msg.z);
}

FlightController::FlightController(const Policy& policy)
    : policy_(policy), model_(policy.params) {
  check_digest(policy_, model_);
}

LinkMessage FlightController::respond(const LinkMessage& msg, int line_no) {
  if (msg.tag != LinkMessage::Tag::observation) {
    throw ProtocolError(line_no, "expected an O line");
  }
  if (finished_) throw ProtocolError(line_no, "observation after done");
  if (msg.z < 1 || msg.z > model_.n()) {
    throw ProtocolError(line_no, "altitude Z=" + std::to_string(msg.z) + " out of range");
  }
  auto close = [this] {
    finished_ = true;
    return action_message(std::nullopt);
  };
  if (!started_) {
    if (msg.obs != ObsSymbol::none) {
      throw ProtocolError(line_no, "first observation must be none");
    }
    belief_ = uniform_init(model_.n(), msg.z);
    started_ = true;
  } else if (last_action_ == Action::look) {
    if (msg.obs == ObsSymbol::none) throw ProtocolError(line_no, "look answered with none");
    if (msg.z != belief_.z) throw ProtocolError(line_no, "altitude changed during look");
    try {
      belief_ = update(model_, belief_, Action::look, msg.obs, msg.z);
    } catch (const FilterDegenerateError& e) {
      throw ProtocolError(line_no, e.what());
    }
    if (msg.z == 1 && msg.obs == ObsSymbol::seen &&
        belief_.probs[static_cast<std::size_t>(model_.target_cell())] >= kDoneMass) {
      return close();
    }
  } else {
    if (msg.obs == ObsSymbol::seen && msg.z == 1) return close();  // arrival report
    if (msg.obs != ObsSymbol::none) {
      throw ProtocolError(line_no, "motion answered with " + std::string(to_string(msg.obs)));
    }
    if (std::abs(msg.z - belief_.z) > 1) {
      throw ProtocolError(line_no, "altitude jumped by more than one level");
    }
    try {
      belief_ = update(model_, belief_, last_action_, ObsSymbol::none, msg.z);
    } catch (const FilterDegenerateError& e) {
      throw ProtocolError(line_no, e.what());
    }
  }
  last_action_ = policy_action(policy_, model_, belief_);
  return action_message(last_action_);
}

int fly(const Policy& policy, const std::filesystem::path& link, const FlyOptions& opts) {
  FlightController ctl(policy);
  LinkReader reader(link);
  std::deque<std::string> lines;
  std::optional<std::string> pending;  // reply not yet seen in the file
  bool written = false;
  int line_no = 0;
  auto log = [&](std::string_view dir, int no, const std::string& text) {
    if (opts.log != nullptr) {
      *opts.log << '[' << timestamp() << "] " << dir << " line " << no << ": " << text << '\n';
      opts.log->flush();
    }
  };
  if (opts.log != nullptr) {
    *opts.log << '[' << timestamp() << "] policy digest " << policy.digest << ", link "
              << link.string() << '\n';
  }
  auto idle_since = std::chrono::steady_clock::now();
  for (;;) {
    reader.poll(lines);
    if (!lines.empty()) idle_since = std::chrono::steady_clock::now();
    while (!lines.empty()) {
      const std::string line = std::move(lines.front());
      lines.pop_front();
      ++line_no;
      const LinkMessage msg = parse_link_line(line, line_no);
      if (pending) {
        if (msg.tag != LinkMessage::Tag::action) {
          throw ProtocolError(line_no, "expected an A line, got '" + line + "'");
        }
        if (line != *pending) {
          throw ProtocolError(line_no, "action '" + line + "' differs from controller's '" +
                                           *pending + "'");
        }
        if (!written) log("replay", line_no, line);
        pending.reset();
        written = false;
        if (ctl.finished()) return 0;
        continue;
      }
      if (msg.tag != LinkMessage::Tag::observation) {
        throw ProtocolError(line_no, "expected an O line, got '" + line + "'");
      }
      log("recv", line_no, line);
      pending = format_link_line(ctl.respond(msg, line_no));
      if (opts.dump_belief && ctl.started()) {
        std::ofstream dump(*opts.dump_belief, std::ios::binary | std::ios::trunc);
        write_belief(dump, ctl.belief());
      }
    }
    if (pending && !written) {
      append_line(link, *pending);
      written = true;
      log("send", line_no + 1, *pending);
      continue;
    }
    if (opts.idle_timeout.count() > 0 &&
        std::chrono::steady_clock::now() - idle_since > opts.idle_timeout) {
      throw ProtocolError(0, "timed out waiting for the drone");
    }
    std::this_thread::sleep_for(opts.poll_interval);
  }
}

}  // namespace relsearch
