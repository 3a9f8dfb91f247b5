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

// The gateway control tick. Each tick:
//
//   1. drain board telemetry, update link liveness and odometry
//   2. run the safety supervisor on the gathered inputs
//   3. pick a twist (held teleop preempts the autopilot)
//   4. twist -> Ackermann -> minimum radius -> steer target / drive units
//   5. gate drive units on motor power and the pedestrian stop rule
//   6. send heartbeat, relay, drive and steer packets

#ifndef PODCAR_CONTROL_H_
#define PODCAR_CONTROL_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "podcar/autopilot.h"
#include "podcar/board.h"
#include "podcar/calibration.h"
#include "podcar/kinematics.h"
#include "podcar/perception.h"
#include "podcar/safety.h"
#include "podcar/teleop.h"
#include "podcar/telemetry_log.h"
#include "podcar/wire.h"

namespace podcar::gateway {

struct PedestrianStopParams {
  double stop_radius = 1.5;  // m
  double horizon_s = 3.0;
  double hold_s = 1.0;  // stays stopped this long after the last conflict
};

struct ControlConfig {
  kinematics::VehicleGeometry geometry;
  kinematics::TwistParams twist;
  TeleopConfig teleop;
  AutopilotParams autopilot;
  PedestrianStopParams pedestrian_stop;
  double units_to_mps = 0.0005;
  int max_driver_units = wire::kDefaultMaxDriverUnits;
  double heartbeat_timeout_s = 0.5;
  double low_battery_v = safety::kDefaultLowBatteryV;
  double tick_hz = 50.0;
  int power_relay_channel = 0;
  double ui_input_timeout_s = 0.5;
  // Dead-reckoning model, used when no odometry source is attached.
  double motor_tau_s = 0.5;
  double brake_decel = 3.0;

  void Validate() const;
};

// Pose and speed from an external odometry source (the simulator).
struct OdometrySample {
  kinematics::Pose2 pose;
  double v = 0.0;
};

// True when a track's predicted relative path passes within the stop radius
// inside the horizon.
bool PedestrianConflict(const kinematics::Pose2& pose, double v,
                        const perception::TrackState& track, double reference_offset_m,
                        const PedestrianStopParams& params);

struct TickReport {
  std::vector<wire::WireMessage> sent;
  TelemetryFrame frame;
  safety::SafetyDecision decision;
  bool goal_done = false;
  std::string status;  // operator-facing note, e.g. a refused reset
};

class ControlLoop {
 public:
  // Throws Error(kNoCalibration) when `calib` is empty.
  ControlLoop(ControlConfig cfg, std::optional<calibration::CalibrationMap> calib,
              board::BoardLink& link, double start_time_s = 0.0);

  // Operator inputs; they take effect at the next tick.
  void SetJoy(const JoyInput& joy, double now_s);
  void SetEnable(bool held, double now_s);
  void RequestEStop() { estop_pending_ = true; }
  void RequestReset() { reset_pending_ = true; }
  void SetGoal(const Goal& goal);
  void ClearGoal();
  void SetMode(safety::DriveMode mode) { mode_ = mode; }

  TickReport Tick(double now_s, const std::optional<OdometrySample>& odometry,
                  std::span<const perception::TrackState> tracks);

  safety::DriveMode mode() const { return mode_; }
  const ControlConfig& config() const { return cfg_; }
  const calibration::CalibrationMap& calibration() const { return *calib_; }
  std::uint64_t rejected_packets() const { return rejected_packets_; }

 private:
  void DrainLink(double now_s);
  void DeadReckon(double dt);
  void Send(const wire::WireMessage& msg, TickReport& report);

  ControlConfig cfg_;
  std::optional<calibration::CalibrationMap> calib_;
  board::BoardLink& link_;
  wire::LivenessTracker liveness_;
  wire::SequenceCounter seq_;
  safety::SafetySupervisor supervisor_;
  TeleopMapper teleop_;
  safety::DriveMode mode_ = safety::DriveMode::kManual;

  std::optional<wire::Telemetry> telemetry_;
  std::uint64_t rejected_packets_ = 0;

  JoyInput joy_;
  double joy_time_ = -1e300;
  bool ui_enable_ = false;
  double ui_enable_time_ = -1e300;
  bool estop_pending_ = false;
  bool reset_pending_ = false;

  std::optional<Goal> pending_goal_;
  std::optional<PursuitPath> path_;

  kinematics::Pose2 pose_;
  double v_ = 0.0;
  double delta_ = 0.0;
  double last_tick_ = 0.0;
  bool ticked_ = false;
  double steer_target_v_ = 0.0;  // last target sent to the board
  double last_conflict_t_ = -1e300;
};

}  // namespace podcar::gateway

#endif  // PODCAR_CONTROL_H_
