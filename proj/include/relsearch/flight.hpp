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

#ifndef RELSEARCH_FLIGHT_HPP_
#define RELSEARCH_FLIGHT_HPP_

// Text-file exchange with a drone (real or scripted). Both sides append whole
// lines to one link file, strictly alternating and starting with the drone:
//
//   O <seen|not_seen|none> Z=<altitude>     drone -> controller
//   A <east|west|north|south|ascend|descend|look|done>
//
// The first observation is `none` and carries the take-off altitude. A
// motion is answered with `none`, a look with `seen` or `not_seen`. The drone
// reports reaching the target by answering a motion with `O seen Z=1`; the
// controller then closes the exchange with `A done`. It also closes it when a
// look at altitude 1 confirms the target.

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "relsearch/belief.hpp"
#include "relsearch/model.hpp"
#include "relsearch/solver.hpp"

namespace relsearch {

struct LinkMessage {
  enum class Tag : std::uint8_t { observation, action };

  Tag tag = Tag::observation;
  ObsSymbol obs = ObsSymbol::none;  // observation lines
  int z = 0;                        // observation lines
  std::optional<Action> action;     // action lines; nullopt is `done`

  bool operator==(const LinkMessage&) const = default;
};

LinkMessage observation_message(ObsSymbol o, int z);
LinkMessage action_message(std::optional<Action> a);

// Throws ProtocolError carrying `line_no` on malformed input.
LinkMessage parse_link_line(std::string_view line, int line_no);
std::string format_link_line(const LinkMessage& msg);

// Belief-tracking policy executor for the controller side.
class FlightController {
 public:
  explicit FlightController(const Policy& policy);

  // Takes the drone's next observation and returns the action to send.
  LinkMessage respond(const LinkMessage& obs, int line_no);

  bool started() const noexcept { return started_; }
  bool finished() const noexcept { return finished_; }
  const Belief& belief() const noexcept { return belief_; }
  const Model& model() const noexcept { return model_; }

 private:
  const Policy& policy_;
  Model model_;
  Belief belief_;
  Action last_action_ = Action::look;
  bool started_ = false;
  bool finished_ = false;
};

struct FlyOptions {
  std::chrono::milliseconds poll_interval{200};
  // Give up after this long without a new line; zero waits forever.
  std::chrono::milliseconds idle_timeout{0};
  std::ostream* log = nullptr;  // timestamped exchange log
  std::optional<std::filesystem::path> dump_belief;
};

// Runs the control loop until the `A done` line is in the file. Lines already
// present are replayed; an existing action line must match what the
// controller would send. Returns 0 on completion, throws ProtocolError on
// violations.
int fly(const Policy& policy, const std::filesystem::path& link, const FlyOptions& opts);

}  // namespace relsearch

#endif  // RELSEARCH_FLIGHT_HPP_
