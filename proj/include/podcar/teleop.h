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

#ifndef PODCAR_TELEOP_H_
#define PODCAR_TELEOP_H_

#include <optional>
#include <vector>

#include "podcar/kinematics.h"

namespace podcar::gateway {

// Gamepad mapping. Defaults follow the Linux xpad layout: right stick
// drives, right bumper is the enable (software dead man's) button.
struct TeleopConfig {
  int enable_button = 5;
  int speed_axis = 4;
  int steer_axis = 3;
  double scale_x = 0.2;  // m/s at full deflection
  double scale_z = 1.0;  // rad/s at full deflection

  // Throws Error(kBadConfig) if full stick could exceed the driver cap.
  void Validate(double units_to_mps, int max_driver_units) const;
};

struct JoyInput {
  std::vector<double> axes;
  std::vector<bool> buttons;
  double t = 0.0;
};

// nullopt means Suppressed: the enable button is not held. Throws
// Error(kBadAxisIndex) when a configured index is missing from `joy`.
std::optional<kinematics::VelocityCommand> JoyToTwist(const JoyInput& joy,
                                                      const TeleopConfig& cfg);

bool EnableHeld(const JoyInput& joy, const TeleopConfig& cfg);

struct TeleopOutput {
  std::optional<kinematics::VelocityCommand> cmd;
  bool suppressed = true;
  bool release_zero = false;  // the one zero command after release
};

// JoyToTwist plus the single zero command on release of the enable button.
class TeleopMapper {
 public:
  explicit TeleopMapper(TeleopConfig cfg = {}) : cfg_(cfg) {}
  TeleopOutput Map(const JoyInput& joy);
  const TeleopConfig& config() const { return cfg_; }

 private:
  TeleopConfig cfg_;
  bool was_enabled_ = false;
};

// round(v / units_to_mps), clamped to +/- max_driver_units.
int SpeedToUnits(double v, double units_to_mps, int max_driver_units = 400);

}  // namespace podcar::gateway

#endif  // PODCAR_TELEOP_H_
