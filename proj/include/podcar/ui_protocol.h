// Copyright 2026 The Podcar DBW Authors
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

// JSON messages between the gateway and the operator console. The schema is
// in docs/ui_protocol.md and docs/ui_protocol.schema.json.

#ifndef PODCAR_UI_PROTOCOL_H_
#define PODCAR_UI_PROTOCOL_H_

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "podcar/autopilot.h"
#include "podcar/control.h"
#include "podcar/perception.h"
#include "podcar/safety.h"
#include "podcar/telemetry_log.h"

namespace podcar::gateway {

struct UiJoy {
  std::vector<double> axes;  // clamped to [-1, 1] on parse
  std::vector<bool> buttons;
  bool operator==(const UiJoy&) const = default;
};
struct UiEnable {
  bool held = false;
  bool operator==(const UiEnable&) const = default;
};
struct UiEStop {
  bool operator==(const UiEStop&) const = default;
};
struct UiReset {
  bool operator==(const UiReset&) const = default;
};
struct UiGoal {
  Goal goal;
  bool operator==(const UiGoal& o) const {
    return goal.x == o.goal.x && goal.y == o.goal.y && goal.heading == o.goal.heading;
  }
};
struct UiClearGoal {
  bool operator==(const UiClearGoal&) const = default;
};
struct UiMode {
  safety::DriveMode mode = safety::DriveMode::kManual;
  bool operator==(const UiMode&) const = default;
};

using UiCommand =
    std::variant<UiJoy, UiEnable, UiEStop, UiReset, UiGoal, UiClearGoal, UiMode>;

// Throws Error(kBadInput) describing what is wrong with the message.
UiCommand ParseUiCommand(std::string_view text);
std::string UiCommandToJson(const UiCommand& cmd);

// Hands a console command to the control loop.
void ApplyUiCommand(ControlLoop& loop, const UiCommand& cmd, double now_s);

// Telemetry push: the tick frame, the latest scan and the live tracks.
std::string TelemetryToJson(const TelemetryFrame& frame, const perception::LaserScan* scan,
                            const std::vector<perception::TrackState>& tracks);

}  // namespace podcar::gateway

#endif  // PODCAR_UI_PROTOCOL_H_
