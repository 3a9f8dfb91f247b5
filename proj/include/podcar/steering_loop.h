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

#ifndef PODCAR_STEERING_LOOP_H_
#define PODCAR_STEERING_LOOP_H_

#include <optional>

#include "podcar/calibration.h"

namespace podcar::steering {

struct SteerLoopConfig {
  double deadband_v = 0.05;
  double kp = 4.0;  // duty per volt of error
  double max_duty = 1.0;
  double min_duty = 0.15;  // breaks actuator stiction

  void Validate() const;
};

// Signed duty cycle for the actuator H-bridge; positive extends.
struct ActuatorDrive {
  double duty = 0.0;
};

// Proportional servo with deadband and minimum breakaway duty.
ActuatorDrive ServoUpdate(double target_v, double measured_v,
                          const SteerLoopConfig& cfg);

// Throws Error(kNoCalibration) when `calib` is empty.
double SteerCommandToTarget(double delta,
                            const std::optional<calibration::CalibrationMap>& calib);

}  // namespace podcar::steering

#endif  // PODCAR_STEERING_LOOP_H_
