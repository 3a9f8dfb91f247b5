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

#include "podcar/config.h"

#include <fstream>
#include <istream>

#include <fmt/format.h>

#include "podcar/error.h"
#include "podcar/keyvalue.h"

namespace podcar::gateway {
namespace {

void Read(const KeyValueFile& kv, const char* key, double& out) {
  if (auto v = kv.GetDouble(key)) out = *v;
}

void Read(const KeyValueFile& kv, const char* key, int& out) {
  if (auto v = kv.GetInt(key)) out = *v;
}

void Read(const KeyValueFile& kv, const char* key, std::string& out) {
  if (auto v = kv.GetString(key)) out = *v;
}

// A key that feeds more than one subsystem, e.g. the wheelbase seen by both
// the controller and the simulated vehicle.
template <typename T, typename... Targets>
void ReadShared(const KeyValueFile& kv, const char* key, T& first, Targets&... rest) {
  Read(kv, key, first);
  ((rest = first), ...);
}

}  // namespace

void GatewayConfig::Validate() const {
  control.Validate();
  plant.Validate();
  board.servo.Validate();
  camera.Validate();
  if (!(perception_hz > 0.0) || !(ui_push_hz > 0.0)) {
    throw Error(ErrorCode::kBadConfig, "perception and UI rates must be positive");
  }
  if (!(detection_sigma_m > 0.0) || !(track_max_age_s > 0.0)) {
    throw Error(ErrorCode::kBadConfig,
                "detection_sigma_m and track_max_age_s must be positive");
  }
  if (calibration_sweep_points < 2) {
    throw Error(ErrorCode::kBadConfig, "calibration_sweep_points must be at least 2");
  }
  for (int port : {udp_cmd_port, udp_tel_port, ui_port}) {
    if (port < 0 || port > 65535) {
      throw Error(ErrorCode::kBadConfig, fmt::format("port {} out of range", port));
    }
  }
  if (!(board.plant_dt_max_s > 0.0)) {
    throw Error(ErrorCode::kBadConfig, "plant_dt_max_s must be positive");
  }
}

GatewayConfig ParseGatewayConfig(std::istream& in, const std::string& source) {
  const KeyValueFile kv = KeyValueFile::Parse(in, source);
  GatewayConfig c;

  // Vehicle.
  ReadShared(kv, "wheelbase_m", c.control.geometry.wheelbase_m, c.plant.geometry.wheelbase_m);
  ReadShared(kv, "track_m", c.control.geometry.track_m, c.plant.geometry.track_m);
  ReadShared(kv, "min_turning_radius_m", c.control.geometry.min_turning_radius_m,
             c.plant.geometry.min_turning_radius_m);
  ReadShared(kv, "units_to_mps", c.control.units_to_mps, c.plant.units_to_mps);
  ReadShared(kv, "max_driver_units", c.control.max_driver_units,
             c.board.limits.max_driver_units);
  ReadShared(kv, "heartbeat_timeout_s", c.control.heartbeat_timeout_s,
             c.board.heartbeat_timeout_s);
  ReadShared(kv, "power_relay_channel", c.control.power_relay_channel,
             c.board.power_relay_channel);
  ReadShared(kv, "motor_tau_s", c.plant.motor_tau_s, c.control.motor_tau_s);
  ReadShared(kv, "brake_decel", c.plant.brake_decel, c.control.brake_decel);

  // Control.
  Read(kv, "tick_hz", c.control.tick_hz);
  Read(kv, "low_battery_v", c.control.low_battery_v);
  Read(kv, "ui_input_timeout_s", c.control.ui_input_timeout_s);
  Read(kv, "dry_steer_v_eps", c.control.twist.v_eps);
  Read(kv, "dry_steer_wz_full", c.control.twist.wz_full);
  Read(kv, "teleop_enable_button", c.control.teleop.enable_button);
  Read(kv, "teleop_speed_axis", c.control.teleop.speed_axis);
  Read(kv, "teleop_steer_axis", c.control.teleop.steer_axis);
  Read(kv, "teleop_scale_x", c.control.teleop.scale_x);
  if (!kv.Has("teleop_scale_z")) c.control.teleop.scale_z = c.control.twist.wz_full;
  Read(kv, "teleop_scale_z", c.control.teleop.scale_z);
  Read(kv, "autopilot_lookahead_m", c.control.autopilot.lookahead);
  Read(kv, "autopilot_cruise_mps", c.control.autopilot.cruise);
  Read(kv, "autopilot_goal_tol_m", c.control.autopilot.goal_tol);
  Read(kv, "pedestrian_stop_radius_m", c.control.pedestrian_stop.stop_radius);
  Read(kv, "pedestrian_stop_horizon_s", c.control.pedestrian_stop.horizon_s);
  Read(kv, "pedestrian_stop_hold_s", c.control.pedestrian_stop.hold_s);

  // Steering servo (board side).
  Read(kv, "steer_deadband_v", c.board.servo.deadband_v);
  Read(kv, "steer_kp", c.board.servo.kp);
  Read(kv, "steer_max_duty", c.board.servo.max_duty);
  Read(kv, "steer_min_duty", c.board.servo.min_duty);
  Read(kv, "plant_dt_max_s", c.board.plant_dt_max_s);

  // Simulated vehicle.
  Read(kv, "max_speed_mps", c.plant.max_speed_mps);
  Read(kv, "actuator_rate_mps", c.plant.actuator_rate_mps);
  Read(kv, "actuator_stroke_m", c.plant.stroke_m);
  Read(kv, "pot_span_v", c.plant.pot_span_v);
  Read(kv, "breaker_trip_a", c.plant.breaker_trip_a);
  Read(kv, "fuse_trip_a", c.plant.fuse_trip_a);
  Read(kv, "battery_capacity_ah", c.plant.battery_capacity_ah);
  Read(kv, "battery_ocv_full_v", c.plant.battery_ocv_full_v);
  Read(kv, "battery_ocv_empty_v", c.plant.battery_ocv_empty_v);
  Read(kv, "battery_r_int_ohm", c.plant.battery_r_int_ohm);
  Read(kv, "motor_a_per_mps", c.plant.motor_a_per_mps);
  Read(kv, "motor_a_per_mps2", c.plant.motor_a_per_mps2);
  Read(kv, "actuator_a_full_duty", c.plant.actuator_a_full_duty);
  if (kv.Has("linkage_slope") || kv.Has("linkage_intercept")) {
    calibration::CalibrationMap link = c.plant.Linkage();
    Read(kv, "linkage_slope", link.slope);
    Read(kv, "linkage_intercept", link.intercept);
    link.v_min = 0.0;
    link.v_max = c.plant.pot_span_v;
    c.plant.linkage = link;
  }

  // Camera and perception.
  Read(kv, "camera_fx", c.camera.fx);
  Read(kv, "camera_fy", c.camera.fy);
  Read(kv, "camera_cx", c.camera.cx);
  Read(kv, "camera_cy", c.camera.cy);
  Read(kv, "camera_width", c.camera.width);
  Read(kv, "camera_height", c.camera.height);
  Read(kv, "camera_range_min", c.camera.range_min);
  Read(kv, "camera_range_max", c.camera.range_max);
  Read(kv, "camera_pitch_offset", c.camera.pitch_offset);
  Read(kv, "camera_forward_m", c.mount.forward_m);
  Read(kv, "camera_height_m", c.mount.height_m);
  Read(kv, "scan_floor_z_max", c.scan.floor_z_max);
  Read(kv, "scan_angle_min", c.scan.angle_min);
  Read(kv, "scan_angle_max", c.scan.angle_max);
  Read(kv, "scan_angle_increment", c.scan.angle_increment);
  Read(kv, "scan_range_min", c.scan.range_min);
  Read(kv, "scan_range_max", c.scan.range_max);
  Read(kv, "kalman_accel_noise", c.kalman.accel_noise);
  Read(kv, "kalman_initial_position_var", c.kalman.initial_position_var);
  Read(kv, "kalman_initial_velocity_var", c.kalman.initial_velocity_var);
  Read(kv, "pedestrian_depth_m", c.projection.pedestrian_depth_m);
  Read(kv, "perception_hz", c.perception_hz);
  Read(kv, "detection_sigma_m", c.detection_sigma_m);
  Read(kv, "track_max_age_s", c.track_max_age_s);

  // Calibration and I/O.
  if (auto path = kv.GetString("calibration_file")) c.calibration_file = *path;
  Read(kv, "calibration_sweep_points", c.calibration_sweep_points);
  Read(kv, "calibration_noise_v", c.calibration_noise_v);
  Read(kv, "board_host", c.board_host);
  Read(kv, "udp_cmd_port", c.udp_cmd_port);
  Read(kv, "udp_tel_port", c.udp_tel_port);
  Read(kv, "ui_port", c.ui_port);
  Read(kv, "ui_push_hz", c.ui_push_hz);

  kv.RejectUnused();
  try {
    c.Validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kBadConfig) throw;
    // e.g. a track too wide for the turning radius
    throw Error(ErrorCode::kBadConfig, fmt::format("{}: {}", source, e.what()));
  }
  return c;
}

GatewayConfig LoadGatewayConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kBadConfig, fmt::format("cannot open {}", path.string()));
  }
  return ParseGatewayConfig(in, path.string());
}

}  // namespace podcar::gateway
