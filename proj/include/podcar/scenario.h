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

// Scenario files and the deterministic simulation runtime.
//
// A scenario is line based, one directive per line, `#` starts a comment:
//
//   name crossing
//   duration 40
//   seed 7
//   mode autonomous
//   start 0 0 0                       # x y theta
//   goal 12 0 0                       # x y heading
//   obstacle 6 3 0.5  1 1 1           # centre xyz, size xyz
//   pedestrian 1  6 -4  0 1.2  2.0    # id, start xy, velocity xy, t_start
//   floor on
//   at 5.0 silence_link               # timed events
//
// Timed events: silence_link [commands|telemetry|both], restore_link,
// dmh open|closed, estop, reset, joy SPEED STEER ENABLE, joy_off,
// enable 0|1, mode manual|autonomous, goal X Y HEADING, clear_goal,
// fault_load AMPS, reset_power_chain.

#ifndef PODCAR_SCENARIO_H_
#define PODCAR_SCENARIO_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "podcar/autopilot.h"
#include "podcar/board.h"
#include "podcar/config.h"
#include "podcar/control.h"
#include "podcar/scene.h"

namespace podcar::gateway {

struct ScenarioEvent {
  double t = 0.0;
  std::string kind;
  std::vector<std::string> args;
  int line = 0;
};

struct Scenario {
  std::string name = "unnamed";
  double duration_s = 10.0;
  std::uint64_t seed = 0;
  safety::DriveMode mode = safety::DriveMode::kManual;
  kinematics::Pose2 start;
  std::optional<Goal> goal;
  std::vector<plant::SceneBox> obstacles;
  std::vector<plant::PedestrianTruth> pedestrians;
  bool render_floor = true;
  std::vector<ScenarioEvent> events;  // sorted by time, stable
};

// Throws Error(kBadScenarioFile) naming the line and field.
Scenario ParseScenario(std::istream& in, const std::string& source = "");
Scenario LoadScenario(const std::filesystem::path& path);

// One pedestrian observation, kept for accuracy checks.
struct PedestrianObservation {
  double t = 0.0;
  int pedestrian_id = 0;
  Eigen::Vector2d truth = Eigen::Vector2d::Zero();     // facing surface point
  Eigen::Vector2d estimate = Eigen::Vector2d::Zero();  // from the 3D box
  double range_m = 0.0;  // camera to truth, ground plane
};

struct ScenarioSummary {
  bool goal_reached = false;
  double terminal_distance_m = 0.0;  // to the goal, from the true pose
  double min_pedestrian_distance_m = 0.0;  // front axle to pedestrian outline
  int safety_events = 0;  // transitions out of ACTIVE plus refused resets
  std::vector<double> pedestrian_stop_times;  // rising edges of the stop rule
  int max_abs_drive_units = 0;
  std::uint64_t drive_packets = 0;
  double max_heartbeat_gap_s = 0.0;
};

// Frame pushed to the operator console: the tick frame plus perception.
struct PerceptionSnapshot {
  perception::LaserScan scan;
  std::vector<perception::TrackState> tracks;
};

// Owns the simulated board, the link and the control loop, and steps them
// in a fixed order each tick so runs are reproducible.
class SimRuntime {
 public:
  SimRuntime(const GatewayConfig& cfg, const Scenario& scenario);

  // Advances one control period. Returns the control report of this tick.
  TickReport Step();
  bool Finished() const;

  double now() const;
  std::int64_t ticks() const { return tick_; }
  ControlLoop& control() { return *control_; }
  board::SimBoard& board() { return *board_; }
  board::LoopbackLink& link() { return link_; }
  const plant::PlantState& truth() const { return board_->plant(); }
  const std::vector<TelemetryFrame>& log() const { return log_; }
  const std::vector<PedestrianObservation>& observations() const { return observations_; }
  const PerceptionSnapshot& perception() const { return snapshot_; }
  const calibration::CalibrationMap& calibration() const { return calib_; }
  ScenarioSummary Summary() const;

 private:
  void ApplyEvent(const ScenarioEvent& ev, double now);
  void RunPerception(double now);

  GatewayConfig cfg_;
  Scenario scenario_;
  calibration::CalibrationMap calib_;
  board::LoopbackLink link_;
  std::unique_ptr<board::SimBoard> board_;
  std::unique_ptr<ControlLoop> control_;
  perception::PedestrianTracker tracker_;
  PerceptionSnapshot snapshot_;

  std::int64_t tick_ = 0;
  std::size_t next_event_ = 0;
  int perception_every_ = 1;
  double fault_load_a_ = 0.0;
  std::optional<JoyInput> held_joy_;
  bool held_enable_ = false;

  std::vector<TelemetryFrame> log_;
  std::vector<PedestrianObservation> observations_;
  bool goal_reached_ = false;
  int safety_events_ = 0;
  bool was_active_ = false;
  bool was_stopping_ = false;
  std::vector<double> stop_times_;
  double min_ped_distance_ = 1e300;
  int max_abs_units_ = 0;
  std::uint64_t drive_packets_ = 0;
  std::optional<double> last_heartbeat_;
  double max_heartbeat_gap_ = 0.0;
};

// Calibrates the steering map by sweeping the simulated linkage.
calibration::CalibrationMap CalibrateSimulatedSteering(const GatewayConfig& cfg,
                                                       std::uint64_t seed);

struct ScenarioResult {
  std::vector<TelemetryFrame> log;
  ScenarioSummary summary;
  std::vector<PedestrianObservation> observations;
};

// Runs to the scenario duration. Frames are streamed to `csv` if given.
ScenarioResult RunScenario(const GatewayConfig& cfg, const Scenario& scenario,
                           std::ostream* csv = nullptr);

void WriteSummary(std::ostream& out, const Scenario& scenario,
                  const ScenarioSummary& summary);

}  // namespace podcar::gateway

#endif  // PODCAR_SCENARIO_H_
