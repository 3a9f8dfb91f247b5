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

#include "podcar/ui_protocol.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

#include "podcar/error.h"

namespace podcar::gateway {
namespace {

using nlohmann::json;

[[noreturn]] void Bad(const std::string& what) {
  throw Error(ErrorCode::kBadInput, "ui message: " + what);
}

double Number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) Bad(fmt::format("'{}' must be a number", key));
  const double v = j[key].get<double>();
  if (!std::isfinite(v)) Bad(fmt::format("'{}' must be finite", key));
  return v;
}

bool Bool(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_boolean()) Bad(fmt::format("'{}' must be a boolean", key));
  return j[key].get<bool>();
}

// Inf/NaN are not JSON; a missing return is sent as null.
json Range(float r) { return std::isfinite(r) ? json(r) : json(nullptr); }

}  // namespace

UiCommand ParseUiCommand(std::string_view text) {
  const json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) Bad("not valid JSON");
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    Bad("expected an object with a string 'type'");
  }
  const std::string type = j["type"];
  if (type == "joy") {
    if (!j.contains("axes") || !j["axes"].is_array()) Bad("'axes' must be an array");
    if (!j.contains("buttons") || !j["buttons"].is_array()) Bad("'buttons' must be an array");
    UiJoy joy;
    for (const auto& a : j["axes"]) {
      if (!a.is_number() || !std::isfinite(a.get<double>())) Bad("axes must be finite numbers");
      joy.axes.push_back(std::clamp(a.get<double>(), -1.0, 1.0));
    }
    for (const auto& b : j["buttons"]) {
      if (b.is_boolean()) {
        joy.buttons.push_back(b.get<bool>());
      } else if (b.is_number_integer()) {
        joy.buttons.push_back(b.get<int>() != 0);
      } else {
        Bad("buttons must be booleans or 0/1");
      }
    }
    return joy;
  }
  if (type == "enable") return UiEnable{Bool(j, "held")};
  if (type == "estop") return UiEStop{};
  if (type == "reset") return UiReset{};
  if (type == "goal") {
    Goal g{Number(j, "x"), Number(j, "y"), 0.0};
    if (j.contains("heading")) g.heading = Number(j, "heading");
    return UiGoal{g};
  }
  if (type == "clear_goal") return UiClearGoal{};
  if (type == "mode") {
    if (!j.contains("mode") || !j["mode"].is_string()) Bad("'mode' must be a string");
    const std::string m = j["mode"];
    if (m == "MANUAL" || m == "manual") return UiMode{safety::DriveMode::kManual};
    if (m == "AUTONOMOUS" || m == "autonomous") return UiMode{safety::DriveMode::kAutonomous};
    Bad(fmt::format("unknown mode '{}'", m));
  }
  Bad(fmt::format("unknown type '{}'", type));
}

std::string UiCommandToJson(const UiCommand& cmd) {
  json j;
  std::visit(
      [&j](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, UiJoy>) {
          j = {{"type", "joy"}, {"axes", c.axes}, {"buttons", c.buttons}};
        } else if constexpr (std::is_same_v<T, UiEnable>) {
          j = {{"type", "enable"}, {"held", c.held}};
        } else if constexpr (std::is_same_v<T, UiEStop>) {
          j = {{"type", "estop"}};
        } else if constexpr (std::is_same_v<T, UiReset>) {
          j = {{"type", "reset"}};
        } else if constexpr (std::is_same_v<T, UiGoal>) {
          j = {{"type", "goal"}, {"x", c.goal.x}, {"y", c.goal.y}, {"heading", c.goal.heading}};
        } else if constexpr (std::is_same_v<T, UiClearGoal>) {
          j = {{"type", "clear_goal"}};
        } else {
          j = {{"type", "mode"}, {"mode", safety::DriveModeName(c.mode)}};
        }
      },
      cmd);
  return j.dump();
}

void ApplyUiCommand(ControlLoop& loop, const UiCommand& cmd, double now_s) {
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, UiJoy>) {
          JoyInput joy;
          joy.axes = c.axes;
          joy.buttons = c.buttons;
          joy.t = now_s;
          loop.SetJoy(joy, now_s);
        } else if constexpr (std::is_same_v<T, UiEnable>) {
          loop.SetEnable(c.held, now_s);
        } else if constexpr (std::is_same_v<T, UiEStop>) {
          loop.RequestEStop();
        } else if constexpr (std::is_same_v<T, UiReset>) {
          loop.RequestReset();
        } else if constexpr (std::is_same_v<T, UiGoal>) {
          loop.SetGoal(c.goal);
        } else if constexpr (std::is_same_v<T, UiClearGoal>) {
          loop.ClearGoal();
        } else {
          loop.SetMode(c.mode);
        }
      },
      cmd);
}

std::string TelemetryToJson(const TelemetryFrame& f, const perception::LaserScan* scan,
                            const std::vector<perception::TrackState>& tracks) {
  json frame = {
      {"t", f.t},
      {"x", f.x},
      {"y", f.y},
      {"theta", f.theta},
      {"v", f.v},
      {"delta", f.delta},
      {"mode", safety::DriveModeName(f.mode)},
      {"safety_state", safety::SafetyStateName(f.safety_state)},
      {"safety_reason", safety::SafetyReasonName(f.safety_reason)},
      {"motor_power", f.motor_power},
      {"brake_engaged", f.brake_engaged},
      {"link_stale", f.link_stale},
      {"steer_feedback_v", f.steer_feedback_v},
      {"steer_target_v", f.steer_target_v},
      {"motor_units", f.motor_units},
      {"battery_v", f.battery_v},
      {"active_tracks", f.active_tracks},
      {"pedestrian_stop", f.pedestrian_stop},
      {"goal_active", f.goal_active},
      {"distance_to_goal", f.distance_to_goal},
  };
  json out = {{"type", "telemetry"}, {"frame", frame}};
  if (scan != nullptr) {
    json ranges = json::array();
    for (float r : scan->ranges) ranges.push_back(Range(r));
    out["scan"] = {{"angle_min", scan->angle_min},
                   {"angle_increment", scan->angle_increment},
                   {"range_max", scan->range_max},
                   {"ranges", ranges}};
  }
  json tr = json::array();
  for (const auto& t : tracks) {
    tr.push_back({{"id", t.id},
                  {"x", t.position.x()},
                  {"y", t.position.y()},
                  {"vx", t.velocity.x()},
                  {"vy", t.velocity.y()}});
  }
  out["tracks"] = tr;
  return out.dump();
}

}  // namespace podcar::gateway
