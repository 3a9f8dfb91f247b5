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

#include "podcar/plant.h"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "podcar/error.h"

namespace podcar::plant {
namespace {

double MoveToward(double value, double target, double max_step) {
  if (value < target) return std::min(target, value + max_step);
  return std::max(target, value - max_step);
}

}  // namespace

calibration::CalibrationMap PlantConfig::Linkage() const {
  if (linkage) return *linkage;
  calibration::CalibrationMap map;
  map.intercept = pot_span_v / 2.0;
  map.slope = (pot_span_v / 2.0) / geometry.MaxSteerDelta();
  map.v_min = 0.0;
  map.v_max = pot_span_v;
  return map;
}

void PlantConfig::Validate() const {
  geometry.Validate();
  const double positives[] = {units_to_mps,       max_speed_mps,     motor_tau_s,
                              actuator_rate_mps,  stroke_m,          pot_span_v,
                              brake_decel,        breaker_trip_a,    fuse_trip_a,
                              battery_capacity_ah};
  for (double value : positives) {
    if (!(value > 0.0)) {
      throw Error(ErrorCode::kBadConfig, "plant parameters must be positive");
    }
  }
  if (Linkage().slope == 0.0) {
    throw Error(ErrorCode::kBadConfig, "plant linkage slope must be non-zero");
  }
}

double OpenCircuitVoltage(double charge_ah, const PlantConfig& cfg) {
  const double soc = std::clamp(charge_ah / cfg.battery_capacity_ah, 0.0, 1.0);
  return cfg.battery_ocv_empty_v +
         (cfg.battery_ocv_full_v - cfg.battery_ocv_empty_v) * soc;
}

PlantState InitialState(const PlantConfig& cfg) {
  PlantState s;
  s.charge_ah = cfg.battery_capacity_ah;
  s.battery_v = OpenCircuitVoltage(s.charge_ah, cfg);
  return WithSteeringAngle(s, 0.0, cfg);
}

PlantState WithSteeringAngle(const PlantState& state, double delta,
                             const PlantConfig& cfg) {
  const calibration::CalibrationMap linkage = cfg.Linkage();
  const double volts =
      std::clamp(linkage.slope * delta + linkage.intercept, 0.0, cfg.pot_span_v);
  PlantState s = state;
  s.extension = volts / cfg.pot_span_v * cfg.stroke_m;
  s.feedback_v = cfg.pot_span_v * s.extension / cfg.stroke_m;
  s.delta = calibration::VoltageToAngle(linkage, s.feedback_v);
  return s;
}

PlantState Step(const PlantState& state, const PlantInputs& inputs, double dt,
                const PlantConfig& cfg) {
  if (!(dt > 0.0) || dt > 0.1) {
    throw Error(ErrorCode::kInvalidDt, fmt::format("dt {} outside (0, 0.1]", dt));
  }
  PlantState s = state;

  // Explicit Euler on the bicycle model, from the pre-step state.
  s.x += state.v * std::cos(state.theta) * dt;
  s.y += state.v * std::sin(state.theta) * dt;
  s.theta += state.v * std::tan(state.delta) / cfg.geometry.wheelbase_m * dt;

  s.power_relay_closed = inputs.relay_coil_energized && state.dmh_closed;
  const bool path_closed =
      s.power_relay_closed && !state.breaker_tripped && !state.fuse_blown;
  s.brake_engaged = !path_closed;
  s.motor_units = inputs.motor_units;
  s.relay_channels = inputs.relay_channels;

  double motor_a = 0.0;
  if (path_closed) {
    const double target = std::clamp(inputs.motor_units * cfg.units_to_mps,
                                     -cfg.max_speed_mps, cfg.max_speed_mps);
    s.v = target + (state.v - target) * std::exp(-dt / cfg.motor_tau_s);
    const double accel = std::abs(s.v - state.v) / dt;
    motor_a = cfg.motor_a_per_mps * std::abs(s.v) + cfg.motor_a_per_mps2 * accel +
              std::max(0.0, inputs.fault_load_a);
  } else {
    s.v = MoveToward(state.v, 0.0, cfg.brake_decel * dt);
  }
  s.v = std::clamp(s.v, -cfg.max_speed_mps, cfg.max_speed_mps);

  const double duty = std::clamp(inputs.actuator_duty, -1.0, 1.0);
  s.extension = std::clamp(state.extension + duty * cfg.actuator_rate_mps * dt,
                           0.0, cfg.stroke_m);
  s.feedback_v = cfg.pot_span_v * s.extension / cfg.stroke_m;
  s.delta = calibration::VoltageToAngle(cfg.Linkage(), s.feedback_v);
  const double actuator_a = cfg.actuator_a_full_duty * std::abs(duty);

  s.current_a = motor_a + actuator_a;
  s.charge_ah = std::max(0.0, state.charge_ah - s.current_a * dt / 3600.0);
  s.battery_v = OpenCircuitVoltage(s.charge_ah, cfg) - s.current_a * cfg.battery_r_int_ohm;

  if (motor_a > cfg.breaker_trip_a) s.breaker_tripped = true;
  if (s.current_a > cfg.fuse_trip_a) s.fuse_blown = true;

  s.t = state.t + dt;
  return s;
}

PlantState ResetPowerChain(const PlantState& state) {
  PlantState s = state;
  s.breaker_tripped = false;
  s.fuse_blown = false;
  return s;
}

wire::Telemetry ReadTelemetry(const PlantState& state) {
  wire::Telemetry tel;
  tel.steer_mv = static_cast<std::uint16_t>(
      std::clamp(std::lround(state.feedback_v * 1000.0), 0L, 65535L));
  tel.motor_units_echo = static_cast<std::int16_t>(
      std::clamp(state.motor_units, -32768, 32767));
  if (state.dmh_closed) tel.flags |= wire::kFlagDmhClosed;
  if (state.brake_engaged) tel.flags |= wire::kFlagBrakeEngaged;
  if (state.power_relay_closed) tel.flags |= wire::kFlagPowerRelayClosed;
  if (state.breaker_tripped || state.fuse_blown) tel.flags |= wire::kFlagFaultLatched;
  tel.battery_cv = static_cast<std::uint16_t>(
      std::clamp(std::lround(state.battery_v * 100.0), 0L, 65535L));
  return tel;
}

std::vector<calibration::CalibSample> SweepSteering(const PlantConfig& cfg, int samples,
                                                    double voltage_noise_v,
                                                    std::uint64_t seed) {
  if (samples < 2) {
    throw Error(ErrorCode::kInsufficientData, "a sweep needs at least two points");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, std::max(0.0, voltage_noise_v));
  const calibration::CalibrationMap linkage = cfg.Linkage();
  std::vector<calibration::CalibSample> out;
  out.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const double v = cfg.pot_span_v * i / (samples - 1);
    const double delta = calibration::VoltageToAngle(linkage, v);
    out.push_back({delta, v + (voltage_noise_v > 0.0 ? noise(rng) : 0.0)});
  }
  return out;
}

}  // namespace podcar::plant
