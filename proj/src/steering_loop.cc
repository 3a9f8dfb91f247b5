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

#include "podcar/steering_loop.h"

#include <algorithm>
#include <cmath>

#include "podcar/error.h"

namespace podcar::steering {

void SteerLoopConfig::Validate() const {
  if (!(deadband_v > 0.0) || !(min_duty > 0.0) || !(min_duty <= max_duty) ||
      !(max_duty <= 1.0) || !(kp > 0.0)) {
    throw Error(ErrorCode::kBadConfig,
                "steering loop needs deadband > 0, kp > 0 and "
                "0 < min_duty <= max_duty <= 1");
  }
}

ActuatorDrive ServoUpdate(double target_v, double measured_v,
                          const SteerLoopConfig& cfg) {
  const double error = target_v - measured_v;
  if (std::abs(error) <= cfg.deadband_v) return {0.0};
  const double magnitude =
      std::clamp(cfg.kp * std::abs(error), cfg.min_duty, cfg.max_duty);
  return {error > 0.0 ? magnitude : -magnitude};
}

double SteerCommandToTarget(
    double delta, const std::optional<calibration::CalibrationMap>& calib) {
  if (!calib) {
    throw Error(ErrorCode::kNoCalibration, "no steering calibration loaded");
  }
  return calibration::AngleToVoltage(*calib, delta);
}

}  // namespace podcar::steering
