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

#include "podcar/teleop.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "podcar/error.h"

namespace podcar::gateway {
namespace {

double Axis(const JoyInput& joy, int index, const char* name) {
  if (index < 0 || static_cast<std::size_t>(index) >= joy.axes.size()) {
    throw Error(ErrorCode::kBadAxisIndex,
                fmt::format("{} axis {} not present ({} axes)", name, index,
                            joy.axes.size()));
  }
  const double value = joy.axes[index];
  if (!std::isfinite(value)) return 0.0;
  return std::clamp(value, -1.0, 1.0);
}

}  // namespace

void TeleopConfig::Validate(double units_to_mps, int max_driver_units) const {
  if (std::abs(scale_x) / units_to_mps > max_driver_units * (1.0 + 1e-9)) {
    throw Error(ErrorCode::kBadConfig,
                fmt::format("teleop scale_x {} m/s exceeds the {}-unit driver cap",
                            scale_x, max_driver_units));
  }
  if (enable_button < 0 || speed_axis < 0 || steer_axis < 0) {
    throw Error(ErrorCode::kBadConfig, "teleop indices must be non-negative");
  }
}

bool EnableHeld(const JoyInput& joy, const TeleopConfig& cfg) {
  if (cfg.enable_button < 0 ||
      static_cast<std::size_t>(cfg.enable_button) >= joy.buttons.size()) {
    throw Error(ErrorCode::kBadAxisIndex,
                fmt::format("enable button {} not present ({} buttons)",
                            cfg.enable_button, joy.buttons.size()));
  }
  return joy.buttons[cfg.enable_button];
}

std::optional<kinematics::VelocityCommand> JoyToTwist(const JoyInput& joy,
                                                      const TeleopConfig& cfg) {
  const double speed = Axis(joy, cfg.speed_axis, "speed");
  const double steer = Axis(joy, cfg.steer_axis, "steer");
  if (!EnableHeld(joy, cfg)) return std::nullopt;
  return kinematics::VelocityCommand{speed * cfg.scale_x, steer * cfg.scale_z};
}

TeleopOutput TeleopMapper::Map(const JoyInput& joy) {
  TeleopOutput out;
  out.cmd = JoyToTwist(joy, cfg_);
  out.suppressed = !out.cmd.has_value();
  if (out.suppressed && was_enabled_) {
    out.cmd = kinematics::VelocityCommand{0.0, 0.0};
    out.release_zero = true;
  }
  was_enabled_ = !out.suppressed;
  return out;
}

int SpeedToUnits(double v, double units_to_mps, int max_driver_units) {
  if (!std::isfinite(v)) return 0;
  const double units = std::round(v / units_to_mps);
  return static_cast<int>(std::clamp(units, -double(max_driver_units),
                                     double(max_driver_units)));
}

}  // namespace podcar::gateway
