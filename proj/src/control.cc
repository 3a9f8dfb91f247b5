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

#include "podcar/control.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "podcar/error.h"
#include "podcar/steering_loop.h"

namespace podcar::gateway {
namespace {

double MoveToward(double value, double target, double max_step) {
  if (value < target) return std::min(target, value + max_step);
  return std::max(target, value - max_step);
}

}  // namespace

void ControlConfig::Validate() const {
  geometry.Validate();
  teleop.Validate(units_to_mps, max_driver_units);
  if (!(pedestrian_stop.stop_radius >= 0.0) || !(pedestrian_stop.horizon_s >= 0.0) ||
      !(pedestrian_stop.hold_s >= 0.0)) {
    throw Error(ErrorCode::kBadConfig, "pedestrian stop parameters must be non-negative");
  }
  if (!(tick_hz > 0.0) || !(heartbeat_timeout_s > 0.0) || !(units_to_mps > 0.0)) {
    throw Error(ErrorCode::kBadConfig,
                "tick rate, heartbeat timeout and units_to_mps must be positive");
  }
  if (max_driver_units <= 0 || max_driver_units > 32767) {
    throw Error(ErrorCode::kBadConfig, "max_driver_units must be in 1..32767");
  }
  if (power_relay_channel < 0 || power_relay_channel > 7) {
    throw Error(ErrorCode::kBadConfig, "power relay channel must be 0..7");
  }
}

bool PedestrianConflict(const kinematics::Pose2& pose, double v,
                        const perception::TrackState& track, double reference_offset_m,
                        const PedestrianStopParams& params) {
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  const double ref_x = pose.x + reference_offset_m * c;
  const double ref_y = pose.y + reference_offset_m * s;
  const double px = track.position.x() - ref_x;
  const double py = track.position.y() - ref_y;
  const double rvx = track.velocity.x() - v * c;
  const double rvy = track.velocity.y() - v * s;
  const double speed_sq = rvx * rvx + rvy * rvy;
  double t_closest = 0.0;
  if (speed_sq > 1e-12) {
    t_closest = std::clamp(-(px * rvx + py * rvy) / speed_sq, 0.0, params.horizon_s);
  }
  return std::hypot(px + rvx * t_closest, py + rvy * t_closest) < params.stop_radius;
}

ControlLoop::ControlLoop(ControlConfig cfg,
                         std::optional<calibration::CalibrationMap> calib,
                         board::BoardLink& link, double start_time_s)
    : cfg_(std::move(cfg)),
      calib_(std::move(calib)),
      link_(link),
      liveness_(cfg_.heartbeat_timeout_s, start_time_s),
      supervisor_(cfg_.low_battery_v),
      teleop_(cfg_.teleop),
      last_tick_(start_time_s) {
  cfg_.Validate();
  if (!calib_) {
    throw Error(ErrorCode::kNoCalibration, "control loop needs a steering calibration");
  }
}

void ControlLoop::SetJoy(const JoyInput& joy, double now_s) {
  // Reject inputs that do not cover the configured indices.
  EnableHeld(joy, cfg_.teleop);
  JoyToTwist(joy, cfg_.teleop);
  joy_ = joy;
  joy_time_ = now_s;
}

void ControlLoop::SetEnable(bool held, double now_s) {
  ui_enable_ = held;
  ui_enable_time_ = now_s;
}

void ControlLoop::SetGoal(const Goal& goal) { pending_goal_ = goal; }

void ControlLoop::ClearGoal() {
  pending_goal_.reset();
  path_.reset();
}

void ControlLoop::DrainLink(double now_s) {
  while (auto datagram = link_.Poll()) {
    const auto decoded = wire::DecodePacket(*datagram);
    const auto* packet = std::get_if<wire::Packet>(&decoded);
    if (packet == nullptr) {
      ++rejected_packets_;
      continue;
    }
    if (const auto* tel = std::get_if<wire::Telemetry>(&packet->msg)) {
      telemetry_ = *tel;
      liveness_.Update(now_s, true);
    }
  }
  liveness_.Update(now_s, false);
}

void ControlLoop::DeadReckon(double dt) {
  if (dt <= 0.0 || !telemetry_) return;
  pose_.x += v_ * std::cos(pose_.theta) * dt;
  pose_.y += v_ * std::sin(pose_.theta) * dt;
  pose_.theta += v_ * std::tan(delta_) / cfg_.geometry.wheelbase_m * dt;
  if (telemetry_->flags & wire::kFlagBrakeEngaged) {
    v_ = MoveToward(v_, 0.0, cfg_.brake_decel * dt);
  } else {
    const double target = telemetry_->motor_units_echo * cfg_.units_to_mps;
    v_ = target + (v_ - target) * std::exp(-dt / cfg_.motor_tau_s);
  }
}

void ControlLoop::Send(const wire::WireMessage& msg, TickReport& report) {
  const auto bytes =
      wire::EncodePacket(msg, seq_.Next(), wire::WireLimits{cfg_.max_driver_units});
  link_.Send(bytes);
  report.sent.push_back(msg);
}

TickReport ControlLoop::Tick(double now_s, const std::optional<OdometrySample>& odometry,
                             std::span<const perception::TrackState> tracks) {
  TickReport report;
  DrainLink(now_s);
  const double dt = ticked_ ? now_s - last_tick_ : 0.0;
  last_tick_ = now_s;
  ticked_ = true;

  if (telemetry_) {
    delta_ = calibration::VoltageToAngle(*calib_, telemetry_->steer_mv / 1000.0);
  }
  if (odometry) {
    pose_ = odometry->pose;
    v_ = odometry->v;
  } else {
    DeadReckon(dt);
  }

  // Operator input goes neutral when the console stops talking.
  JoyInput joy;
  if (now_s - joy_time_ <= cfg_.ui_input_timeout_s) joy = joy_;
  const std::size_t axes_needed =
      static_cast<std::size_t>(std::max(cfg_.teleop.speed_axis, cfg_.teleop.steer_axis)) + 1;
  const std::size_t buttons_needed = static_cast<std::size_t>(cfg_.teleop.enable_button) + 1;
  if (joy.axes.size() < axes_needed) joy.axes.resize(axes_needed, 0.0);
  if (joy.buttons.size() < buttons_needed) joy.buttons.resize(buttons_needed, false);
  if (ui_enable_ && now_s - ui_enable_time_ <= cfg_.ui_input_timeout_s) {
    joy.buttons[cfg_.teleop.enable_button] = true;
  }

  safety::SafetyInputs in;
  in.dmh_held = telemetry_ && (telemetry_->flags & wire::kFlagDmhClosed);
  in.enable_held = EnableHeld(joy, cfg_.teleop);
  in.estop_rx = estop_pending_;
  in.heartbeat_stale = liveness_.Stale(now_s);
  in.battery_v = telemetry_ ? telemetry_->battery_cv / 100.0 : 0.0;
  in.overcurrent_trip = telemetry_ && (telemetry_->flags & wire::kFlagFaultLatched);
  in.mode = mode_;

  if (reset_pending_) {
    reset_pending_ = false;
    try {
      supervisor_.Reset(in);
    } catch (const Error& e) {
      report.status = e.what();
    }
  }
  const safety::SafetyDecision decision = supervisor_.Tick(in);
  report.decision = decision;

  if (pending_goal_) {
    path_ = PursuitPath{pose_.x, pose_.y, *pending_goal_};
    pending_goal_.reset();
  }

  const TeleopOutput teleop = teleop_.Map(joy);
  std::optional<kinematics::VelocityCommand> twist;
  bool steer_allowed = false;
  double distance_to_goal = 0.0;
  if (!teleop.suppressed) {
    twist = teleop.cmd;
    steer_allowed = true;
  } else if (mode_ == safety::DriveMode::kAutonomous && path_) {
    const AutopilotOutput ap = AutopilotTick(pose_, *path_, cfg_.autopilot);
    distance_to_goal = ap.distance_to_goal;
    twist = ap.cmd;
    steer_allowed = !ap.done;
    if (ap.done) {
      report.goal_done = true;
      path_.reset();
    }
  } else if (teleop.release_zero) {
    twist = teleop.cmd;
  }

  int units = 0;
  double steer_target_v = steer_target_v_;
  std::optional<kinematics::AckermannCommand> ackermann;
  if (twist) {
    ackermann = kinematics::EnforceMinRadius(
        kinematics::TwistToAckermann(*twist, cfg_.geometry, cfg_.twist), cfg_.geometry);
    units = SpeedToUnits(ackermann->speed, cfg_.units_to_mps, cfg_.max_driver_units);
    steer_target_v = steering::SteerCommandToTarget(ackermann->delta, calib_);
  }

  for (const auto& track : tracks) {
    if (PedestrianConflict(pose_, v_, track, cfg_.geometry.wheelbase_m,
                           cfg_.pedestrian_stop)) {
      last_conflict_t_ = now_s;
      break;
    }
  }
  // Held for a while so a stopped vehicle does not creep back into conflict.
  const bool pedestrian_stop = now_s - last_conflict_t_ < cfg_.pedestrian_stop.hold_s;
  if (!decision.motor_power || pedestrian_stop) units = 0;

  Send(wire::Heartbeat{}, report);
  if (estop_pending_) Send(wire::EStop{}, report);
  Send(wire::RelayCmd{static_cast<std::uint8_t>(cfg_.power_relay_channel),
                      decision.motor_power},
       report);
  Send(wire::DriveCmd{static_cast<std::int16_t>(units)}, report);
  if (ackermann && steer_allowed && decision.motor_power) {
    const auto mv = static_cast<std::uint16_t>(
        std::clamp(std::lround(steer_target_v * 1000.0), 0L, 65535L));
    Send(wire::SteerCmd{mv}, report);
    steer_target_v_ = steer_target_v;
  }
  estop_pending_ = false;
  liveness_.MarkTx(now_s);

  TelemetryFrame& f = report.frame;
  f.t = now_s;
  f.x = pose_.x;
  f.y = pose_.y;
  f.theta = pose_.theta;
  f.v = v_;
  f.delta = delta_;
  f.mode = mode_;
  f.safety_state = decision.state;
  f.safety_reason = decision.reason;
  f.motor_power = decision.motor_power;
  f.brake_engaged = !telemetry_ || (telemetry_->flags & wire::kFlagBrakeEngaged);
  f.link_stale = in.heartbeat_stale;
  f.steer_feedback_v = telemetry_ ? telemetry_->steer_mv / 1000.0 : 0.0;
  f.steer_target_v = steer_target_v_;
  f.motor_units = units;
  f.battery_v = in.battery_v;
  f.active_tracks = static_cast<int>(tracks.size());
  f.pedestrian_stop = pedestrian_stop;
  f.goal_active = path_.has_value();
  f.distance_to_goal = distance_to_goal;
  return report;
}

}  // namespace podcar::gateway
