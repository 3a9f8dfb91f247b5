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

#include "podcar/scenario.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "podcar/error.h"
#include "podcar/perception.h"

namespace podcar::gateway {
namespace {

class LineReader {
 public:
  LineReader(std::string source, int line, std::vector<std::string> tokens)
      : source_(std::move(source)), line_(line), tokens_(std::move(tokens)) {}

  [[noreturn]] void Fail(const std::string& what) const {
    throw Error(ErrorCode::kBadScenarioFile,
                fmt::format("{}:{}: {}", source_, line_, what));
  }

  void ExpectCount(std::size_t lo, std::size_t hi) const {
    const std::size_t n = tokens_.size() - 1;
    if (n < lo || n > hi) {
      if (lo == hi) Fail(fmt::format("'{}' takes {} field(s), got {}", tokens_[0], lo, n));
      Fail(fmt::format("'{}' takes {} to {} fields, got {}", tokens_[0], lo, hi, n));
    }
  }

  std::size_t size() const { return tokens_.size(); }
  const std::string& Str(std::size_t i) const { return tokens_.at(i); }

  double Num(std::size_t i, const char* field) const {
    const std::string& s = tokens_.at(i);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
      Fail(fmt::format("field '{}' is not a finite number: '{}'", field, s));
    }
    return value;
  }

  long long Int(std::size_t i, const char* field) const {
    const std::string& s = tokens_.at(i);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      Fail(fmt::format("field '{}' is not an integer: '{}'", field, s));
    }
    return value;
  }

  bool OnOff(std::size_t i, const char* field) const {
    const std::string& s = tokens_.at(i);
    if (s == "on" || s == "1" || s == "true" || s == "closed") return true;
    if (s == "off" || s == "0" || s == "false" || s == "open") return false;
    Fail(fmt::format("field '{}' must be on/off, got '{}'", field, s));
  }

  safety::DriveMode Mode(std::size_t i) const {
    const std::string& s = tokens_.at(i);
    if (s == "manual") return safety::DriveMode::kManual;
    if (s == "autonomous") return safety::DriveMode::kAutonomous;
    Fail(fmt::format("field 'mode' must be manual or autonomous, got '{}'", s));
  }

  int line() const { return line_; }

 private:
  std::string source_;
  int line_;
  std::vector<std::string> tokens_;
};

// Checks the arguments of a timed event; the tokens start at the kind.
void ValidateEvent(const LineReader& r, std::size_t at) {
  const std::string& kind = r.Str(at);
  const std::size_t n = r.size() - at - 1;
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (n < lo || n > hi) {
      r.Fail(fmt::format("event '{}' takes {} to {} argument(s), got {}", kind, lo, hi, n));
    }
  };
  if (kind == "silence_link") {
    need(0, 1);
    if (n == 1) {
      const std::string& which = r.Str(at + 1);
      if (which != "commands" && which != "telemetry" && which != "both") {
        r.Fail(fmt::format("silence_link direction must be commands, telemetry or both, got '{}'",
                           which));
      }
    }
  } else if (kind == "restore_link" || kind == "estop" || kind == "reset" ||
             kind == "joy_off" || kind == "clear_goal" || kind == "reset_power_chain") {
    need(0, 0);
  } else if (kind == "dmh") {
    need(1, 1);
    r.OnOff(at + 1, "dmh");
  } else if (kind == "enable") {
    need(1, 1);
    r.OnOff(at + 1, "enable");
  } else if (kind == "joy") {
    need(3, 3);
    for (std::size_t i = 1; i <= 2; ++i) {
      const double axis = r.Num(at + i, i == 1 ? "speed" : "steer");
      if (axis < -1.0 || axis > 1.0) r.Fail("joy axes must lie in [-1, 1]");
    }
    r.OnOff(at + 3, "enable");
  } else if (kind == "mode") {
    need(1, 1);
    r.Mode(at + 1);
  } else if (kind == "goal") {
    need(3, 3);
    r.Num(at + 1, "x");
    r.Num(at + 2, "y");
    r.Num(at + 3, "heading");
  } else if (kind == "fault_load") {
    need(1, 1);
    if (r.Num(at + 1, "amps") < 0.0) r.Fail("fault_load must be non-negative");
  } else {
    r.Fail(fmt::format("unknown event '{}'", kind));
  }
}

std::vector<std::string> Tokenize(const std::string& raw) {
  std::string line = raw.substr(0, raw.find('#'));
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

}  // namespace

Scenario ParseScenario(std::istream& in, const std::string& source) {
  Scenario sc;
  std::map<std::string, int> seen;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto tokens = Tokenize(raw);
    if (tokens.empty()) continue;
    const LineReader r(source, line_no, tokens);
    const std::string& key = tokens[0];

    static const char* kOnce[] = {"name", "duration", "seed", "mode", "start", "goal", "floor"};
    if (std::find(std::begin(kOnce), std::end(kOnce), key) != std::end(kOnce)) {
      if (seen.contains(key)) {
        r.Fail(fmt::format("'{}' repeated (first on line {})", key, seen[key]));
      }
      seen[key] = line_no;
    }

    if (key == "name") {
      r.ExpectCount(1, 1);
      sc.name = tokens[1];
    } else if (key == "duration") {
      r.ExpectCount(1, 1);
      sc.duration_s = r.Num(1, "duration");
      if (!(sc.duration_s > 0.0)) r.Fail("duration must be positive");
    } else if (key == "seed") {
      r.ExpectCount(1, 1);
      const long long seed = r.Int(1, "seed");
      if (seed < 0) r.Fail("seed must be non-negative");
      sc.seed = static_cast<std::uint64_t>(seed);
    } else if (key == "mode") {
      r.ExpectCount(1, 1);
      sc.mode = r.Mode(1);
    } else if (key == "start") {
      r.ExpectCount(3, 3);
      sc.start = {r.Num(1, "x"), r.Num(2, "y"), r.Num(3, "theta")};
    } else if (key == "goal") {
      r.ExpectCount(3, 3);
      sc.goal = Goal{r.Num(1, "x"), r.Num(2, "y"), r.Num(3, "heading")};
    } else if (key == "floor") {
      r.ExpectCount(1, 1);
      sc.render_floor = r.OnOff(1, "floor");
    } else if (key == "obstacle") {
      r.ExpectCount(6, 6);
      plant::SceneBox box;
      box.center = {r.Num(1, "cx"), r.Num(2, "cy"), r.Num(3, "cz")};
      box.size = {r.Num(4, "sx"), r.Num(5, "sy"), r.Num(6, "sz")};
      if ((box.size.array() <= 0.0).any()) r.Fail("obstacle size must be positive");
      sc.obstacles.push_back(box);
    } else if (key == "pedestrian") {
      r.ExpectCount(6, 8);
      plant::PedestrianTruth ped;
      ped.id = static_cast<int>(r.Int(1, "id"));
      ped.start = {r.Num(2, "start_x"), r.Num(3, "start_y")};
      ped.velocity = {r.Num(4, "vel_x"), r.Num(5, "vel_y")};
      ped.t_start = r.Num(6, "t_start");
      if (tokens.size() > 7) ped.radius = r.Num(7, "radius");
      if (tokens.size() > 8) ped.height = r.Num(8, "height");
      if (!(ped.radius > 0.0) || !(ped.height > 0.0)) {
        r.Fail("pedestrian radius and height must be positive");
      }
      for (const auto& other : sc.pedestrians) {
        if (other.id == ped.id) r.Fail(fmt::format("pedestrian id {} repeated", ped.id));
      }
      sc.pedestrians.push_back(ped);
    } else if (key == "at") {
      if (tokens.size() < 3) r.Fail("'at' needs a time and an event");
      ScenarioEvent ev;
      ev.t = r.Num(1, "time");
      if (ev.t < 0.0) r.Fail("event time must be non-negative");
      ValidateEvent(r, 2);
      ev.kind = tokens[2];
      ev.args.assign(tokens.begin() + 3, tokens.end());
      ev.line = line_no;
      sc.events.push_back(std::move(ev));
    } else {
      r.Fail(fmt::format("unknown directive '{}'", key));
    }
  }
  std::stable_sort(sc.events.begin(), sc.events.end(),
                   [](const ScenarioEvent& a, const ScenarioEvent& b) { return a.t < b.t; });
  return sc;
}

Scenario LoadScenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kBadScenarioFile, fmt::format("cannot open {}", path.string()));
  }
  return ParseScenario(in, path.string());
}

calibration::CalibrationMap CalibrateSimulatedSteering(const GatewayConfig& cfg,
                                                       std::uint64_t seed) {
  const auto samples = plant::SweepSteering(cfg.plant, cfg.calibration_sweep_points,
                                            cfg.calibration_noise_v, seed);
  return calibration::FitLinear(samples);
}

SimRuntime::SimRuntime(const GatewayConfig& cfg, const Scenario& scenario)
    : cfg_(cfg),
      scenario_(scenario),
      calib_(cfg.calibration_file ? calibration::LoadMap(*cfg.calibration_file)
                                  : CalibrateSimulatedSteering(cfg, scenario.seed)),
      tracker_(cfg.kalman, cfg.track_max_age_s) {
  cfg_.Validate();
  plant::PlantState initial = plant::InitialState(cfg_.plant);
  initial.x = scenario_.start.x;
  initial.y = scenario_.start.y;
  initial.theta = scenario_.start.theta;
  board_ = std::make_unique<board::SimBoard>(cfg_.plant, cfg_.board, initial, 0.0);
  control_ = std::make_unique<ControlLoop>(cfg_.control, calib_, link_, 0.0);
  control_->SetMode(scenario_.mode);
  if (scenario_.goal) control_->SetGoal(*scenario_.goal);
  perception_every_ =
      std::max(1, static_cast<int>(std::lround(cfg_.control.tick_hz / cfg_.perception_hz)));
}

double SimRuntime::now() const { return static_cast<double>(tick_) / cfg_.control.tick_hz; }

bool SimRuntime::Finished() const { return now() >= scenario_.duration_s - 1e-9; }

void SimRuntime::ApplyEvent(const ScenarioEvent& ev, double now) {
  const auto& a = ev.args;
  auto on = [](const std::string& s) {
    return s == "on" || s == "1" || s == "true" || s == "closed";
  };
  if (ev.kind == "silence_link") {
    const std::string which = a.empty() ? "both" : a[0];
    if (which != "telemetry") link_.SilenceCommands(true);
    if (which != "commands") link_.SilenceTelemetry(true);
  } else if (ev.kind == "restore_link") {
    link_.SilenceCommands(false);
    link_.SilenceTelemetry(false);
  } else if (ev.kind == "dmh") {
    board_->mutable_plant().dmh_closed = on(a[0]);
  } else if (ev.kind == "estop") {
    control_->RequestEStop();
  } else if (ev.kind == "reset") {
    control_->RequestReset();
  } else if (ev.kind == "joy") {
    JoyInput joy;
    const auto& t = cfg_.control.teleop;
    joy.axes.assign(std::max(t.speed_axis, t.steer_axis) + 1, 0.0);
    joy.buttons.assign(t.enable_button + 1, false);
    joy.axes[t.speed_axis] = std::stod(a[0]);
    joy.axes[t.steer_axis] = std::stod(a[1]);
    joy.buttons[t.enable_button] = on(a[2]);
    joy.t = now;
    held_joy_ = joy;
  } else if (ev.kind == "joy_off") {
    held_joy_.reset();
  } else if (ev.kind == "enable") {
    held_enable_ = on(a[0]);
    control_->SetEnable(held_enable_, now);
  } else if (ev.kind == "mode") {
    control_->SetMode(a[0] == "autonomous" ? safety::DriveMode::kAutonomous
                                           : safety::DriveMode::kManual);
  } else if (ev.kind == "goal") {
    scenario_.goal = Goal{std::stod(a[0]), std::stod(a[1]), std::stod(a[2])};
    goal_reached_ = false;
    control_->SetGoal(*scenario_.goal);
  } else if (ev.kind == "clear_goal") {
    control_->ClearGoal();
  } else if (ev.kind == "fault_load") {
    fault_load_a_ = std::stod(a[0]);
  } else if (ev.kind == "reset_power_chain") {
    board_->mutable_plant() = plant::ResetPowerChain(board_->plant());
  }
}

void SimRuntime::RunPerception(double now) {
  const plant::PlantState& state = board_->plant();
  const kinematics::Pose2 pose{state.x, state.y, state.theta};
  plant::SceneOptions options;
  options.render_floor = scenario_.render_floor;
  const plant::SceneFrame frame = plant::SynthScene(
      state, scenario_.obstacles, scenario_.pedestrians, cfg_.camera, cfg_.mount, options);
  const Eigen::Vector2d camera_xy =
      plant::CameraPoseFor(pose, cfg_.mount, cfg_.camera).origin.head<2>();
  const Eigen::Matrix3d r_obs =
      Eigen::Matrix3d::Identity() * cfg_.detection_sigma_m * cfg_.detection_sigma_m;

  std::vector<perception::Box2D> boxes;
  for (const auto& det : frame.detections) {
    boxes.push_back(det.box);
    perception::Box3D box3;
    try {
      box3 = perception::ProjectTo3d(det.box, frame.depth, cfg_.camera, cfg_.projection);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kNoValidDepth || e.code() == ErrorCode::kBadInput) continue;
      throw;
    }
    const Eigen::Vector3d world = plant::CameraPointToWorld(
        Eigen::Vector3d(box3.x, box3.y, box3.z), pose, cfg_.mount, cfg_.camera);
    tracker_.Observe(det.pedestrian_id, now, world, r_obs);

    const auto ped = std::find_if(
        scenario_.pedestrians.begin(), scenario_.pedestrians.end(),
        [&](const plant::PedestrianTruth& p) { return p.id == det.pedestrian_id; });
    if (ped != scenario_.pedestrians.end()) {
      PedestrianObservation obs;
      obs.t = now;
      obs.pedestrian_id = det.pedestrian_id;
      obs.truth = plant::PedestrianFacingPoint(*ped, now, camera_xy);
      obs.estimate = world.head<2>();
      obs.range_m = (obs.truth - camera_xy).norm();
      observations_.push_back(obs);
    }
  }
  tracker_.Prune(now);

  // Pedestrians are masked out of the scan so they are handled by tracking,
  // not as static obstacles.
  const perception::DepthImage masked = perception::MaskDepth(frame.depth, boxes);
  const perception::PointCloud level = perception::CameraCloudToLevel(
      perception::DepthToCloud(masked, cfg_.camera), cfg_.camera, cfg_.mount);
  snapshot_.scan = perception::CloudToScan(level, cfg_.scan);
}

TickReport SimRuntime::Step() {
  const double t = now();
  const double dt = 1.0 / cfg_.control.tick_hz;
  while (next_event_ < scenario_.events.size() &&
         scenario_.events[next_event_].t <= t + 1e-9) {
    ApplyEvent(scenario_.events[next_event_], t);
    ++next_event_;
  }
  // The console repeats its last input; the gateway sees it as fresh.
  if (held_joy_) {
    JoyInput joy = *held_joy_;
    joy.t = t;
    control_->SetJoy(joy, t);
  }
  if (held_enable_) control_->SetEnable(true, t);

  if (tick_ % perception_every_ == 0) RunPerception(t);
  snapshot_.tracks = tracker_.Snapshot(t);

  const plant::PlantState& truth = board_->plant();
  const OdometrySample odom{{truth.x, truth.y, truth.theta}, truth.v};
  TickReport report = control_->Tick(t, odom, snapshot_.tracks);

  while (auto datagram = link_.BoardPoll()) board_->Receive(*datagram, t);
  link_.BoardSend(board_->Step(t, dt, fault_load_a_));

  for (const auto& msg : report.sent) {
    if (const auto* drive = std::get_if<wire::DriveCmd>(&msg)) {
      ++drive_packets_;
      max_abs_units_ = std::max(max_abs_units_, std::abs(static_cast<int>(drive->units)));
    } else if (std::holds_alternative<wire::Heartbeat>(msg)) {
      if (last_heartbeat_) max_heartbeat_gap_ = std::max(max_heartbeat_gap_, t - *last_heartbeat_);
      last_heartbeat_ = t;
    }
  }
  if (report.goal_done) goal_reached_ = true;
  const bool active = report.decision.state == safety::SafetyState::kActive;
  if (was_active_ && !active) ++safety_events_;
  if (!report.status.empty()) ++safety_events_;
  was_active_ = active;
  if (report.frame.pedestrian_stop && !was_stopping_) stop_times_.push_back(t);
  was_stopping_ = report.frame.pedestrian_stop;

  const plant::PlantState& after = board_->plant();
  const Eigen::Vector2d front(after.x + cfg_.plant.geometry.wheelbase_m * std::cos(after.theta),
                              after.y + cfg_.plant.geometry.wheelbase_m * std::sin(after.theta));
  for (const auto& ped : scenario_.pedestrians) {
    const double d = (ped.PositionAt(after.t) - front).norm() - ped.radius;
    min_ped_distance_ = std::min(min_ped_distance_, d);
  }

  log_.push_back(report.frame);
  ++tick_;
  return report;
}

ScenarioSummary SimRuntime::Summary() const {
  ScenarioSummary s;
  s.goal_reached = goal_reached_;
  if (scenario_.goal) {
    const auto& p = board_->plant();
    s.terminal_distance_m = std::hypot(scenario_.goal->x - p.x, scenario_.goal->y - p.y);
  }
  s.min_pedestrian_distance_m = scenario_.pedestrians.empty()
                                    ? std::numeric_limits<double>::infinity()
                                    : min_ped_distance_;
  s.safety_events = safety_events_;
  s.pedestrian_stop_times = stop_times_;
  s.max_abs_drive_units = max_abs_units_;
  s.drive_packets = drive_packets_;
  s.max_heartbeat_gap_s = max_heartbeat_gap_;
  return s;
}

ScenarioResult RunScenario(const GatewayConfig& cfg, const Scenario& scenario,
                           std::ostream* csv) {
  SimRuntime rt(cfg, scenario);
  std::optional<TelemetryCsvWriter> writer;
  if (csv != nullptr) writer.emplace(*csv);
  while (!rt.Finished()) {
    rt.Step();
    if (writer) writer->Append(rt.log().back());
  }
  return {rt.log(), rt.Summary(), rt.observations()};
}

void WriteSummary(std::ostream& out, const Scenario& scenario,
                  const ScenarioSummary& s) {
  out << fmt::format("scenario = {}\n", scenario.name);
  out << fmt::format("goal_set = {}\n", scenario.goal.has_value());
  out << fmt::format("goal_reached = {}\n", s.goal_reached);
  out << fmt::format("terminal_distance_m = {:.4f}\n", s.terminal_distance_m);
  out << fmt::format("min_pedestrian_distance_m = {:.4f}\n", s.min_pedestrian_distance_m);
  out << fmt::format("safety_events = {}\n", s.safety_events);
  out << "pedestrian_stop_times =";
  for (double t : s.pedestrian_stop_times) out << fmt::format(" {:.2f}", t);
  out << '\n';
  out << fmt::format("max_abs_drive_units = {}\n", s.max_abs_drive_units);
  out << fmt::format("max_heartbeat_gap_s = {:.4f}\n", s.max_heartbeat_gap_s);
}

}  // namespace podcar::gateway
