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

// Discrete-time model of the donor vehicle and its power chain.
//
// Traction power flows battery -> fuse -> breaker -> power relay (30-87) ->
// motor driver -> motor. The relay coil (85-86) is fed by the board through
// the normally-open dead man's handle, so releasing the handle opens the
// relay regardless of software. The electromagnetic brake is spring-applied
// and released only while the traction path carries current.

#ifndef PODCAR_PLANT_H_
#define PODCAR_PLANT_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "podcar/calibration.h"
#include "podcar/kinematics.h"
#include "podcar/wire.h"

namespace podcar::plant {

struct PlantConfig {
  kinematics::VehicleGeometry geometry;
  double units_to_mps = 0.0005;
  double max_speed_mps = 4.17;  // 15 km/h
  double motor_tau_s = 0.5;
  double actuator_rate_mps = 0.05;  // stroke speed at full duty
  double stroke_m = 0.10;
  double pot_span_v = 5.0;
  double brake_decel = 3.0;  // m/s^2
  double breaker_trip_a = 63.0;
  double fuse_trip_a = 100.0;
  double battery_capacity_ah = 36.0;
  double battery_ocv_full_v = 25.4;
  double battery_ocv_empty_v = 23.0;
  double battery_r_int_ohm = 0.05;
  // Simple current draw model for the traction motor and steering actuator.
  double motor_a_per_mps = 12.0;
  double motor_a_per_mps2 = 20.0;
  double actuator_a_full_duty = 4.0;
  // Angle/voltage relation of the real linkage. Unset means a symmetric
  // linkage whose full stroke spans exactly +/- the minimum-radius lock.
  std::optional<calibration::CalibrationMap> linkage;

  calibration::CalibrationMap Linkage() const;
  void Validate() const;
};

struct PlantInputs {
  int motor_units = 0;
  double actuator_duty = 0.0;  // [-1, 1], positive extends
  bool relay_coil_energized = false;
  std::uint8_t relay_channels = 0;
  double fault_load_a = 0.0;  // injected extra draw on the traction path
};

struct PlantState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v = 0.0;
  double delta = 0.0;
  double extension = 0.0;
  double feedback_v = 0.0;
  bool dmh_closed = true;  // hardware handle, set by the operator
  bool power_relay_closed = false;
  bool brake_engaged = true;
  bool breaker_tripped = false;
  bool fuse_blown = false;
  double battery_v = 0.0;
  double charge_ah = 0.0;
  double current_a = 0.0;
  int motor_units = 0;
  std::uint8_t relay_channels = 0;
  double t = 0.0;
};

// Parked, centred steering, full battery.
PlantState InitialState(const PlantConfig& cfg);

// Throws Error(kInvalidDt) unless 0 < dt <= 0.1.
PlantState Step(const PlantState& state, const PlantInputs& inputs, double dt,
                const PlantConfig& cfg);

// Manual reset of the breaker and replacement of the fuse.
PlantState ResetPowerChain(const PlantState& state);

// Puts the actuator where the linkage gives `delta` (clamped to the stroke).
PlantState WithSteeringAngle(const PlantState& state, double delta,
                             const PlantConfig& cfg);

wire::Telemetry ReadTelemetry(const PlantState& state);

double OpenCircuitVoltage(double charge_ah, const PlantConfig& cfg);

// Bench calibration run: steps the actuator across its stroke and records
// the measured angle against the feedback voltage read with Gaussian noise.
std::vector<calibration::CalibSample> SweepSteering(const PlantConfig& cfg, int samples,
                                                    double voltage_noise_v,
                                                    std::uint64_t seed);

}  // namespace podcar::plant

#endif  // PODCAR_PLANT_H_
