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

// Headline checks, one line each. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "oracles.h"
#include "podcar/calibration.h"
#include "podcar/config.h"
#include "podcar/error.h"
#include "podcar/perception.h"
#include "podcar/safety.h"
#include "podcar/scenario.h"
#include "podcar/wire.h"

namespace podcar {
namespace {

using gateway::GatewayConfig;
using gateway::Scenario;
using gateway::ScenarioEvent;
using gateway::SimRuntime;

struct Outcome {
  bool pass = false;
  std::string detail;
};

ScenarioEvent Event(double t, std::string kind, std::vector<std::string> args) {
  return ScenarioEvent{t, std::move(kind), std::move(args), 0};
}

// Full stick forward, back and into a turn. Steady state over the last 2 s.
Outcome SpeedCap() {
  const GatewayConfig cfg;
  struct Case {
    const char* speed;
    const char* steer;
    double expect;
  };
  const Case cases[] = {{"1", "0", 0.2}, {"-1", "0", -0.2}, {"1", "1", 0.2}};
  int max_units = 0;
  double worst_rel = 0.0;
  std::string speeds;
  for (const Case& c : cases) {
    Scenario sc;
    sc.duration_s = 12.0;
    sc.render_floor = false;
    sc.events = {Event(0.5, "joy", {c.speed, c.steer, "1"})};
    SimRuntime rt(cfg, sc);
    double sum = 0.0;
    int n = 0;
    while (!rt.Finished()) {
      const gateway::TickReport r = rt.Step();
      for (const auto& msg : r.sent) {
        if (const auto* d = std::get_if<wire::DriveCmd>(&msg)) {
          max_units = std::max(max_units, std::abs(static_cast<int>(d->units)));
        }
      }
      if (rt.now() > sc.duration_s - 2.0) {
        sum += rt.truth().v;
        ++n;
      }
    }
    const double v = sum / n;
    worst_rel = std::max(worst_rel, std::abs(v - c.expect) / 0.2);
    speeds += fmt::format("{}{:.4f}", speeds.empty() ? "" : " ", v);
  }
  return {worst_rel <= 0.01 && max_units <= 400,
          fmt::format("v_ss [{}] m/s, worst dev {:.2f}%, max |units| {}", speeds,
                      100 * worst_rel, max_units)};
}

Outcome GoalTolerance() {
  const GatewayConfig cfg;
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> dist(5.0, 15.0);
  std::uniform_real_distribution<double> bearing(-std::numbers::pi / 4, std::numbers::pi / 4);
  int reached = 0;
  double worst = 0.0;
  double sim_s = 0.0;
  const auto wall0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 20; ++i) {
    const double d = dist(rng);
    const double b = bearing(rng);
    Scenario sc;
    sc.mode = safety::DriveMode::kAutonomous;
    sc.goal = gateway::Goal{d * std::cos(b), d * std::sin(b), b};
    sc.duration_s = d / cfg.control.autopilot.cruise + 30.0;
    sc.render_floor = false;
    const auto res = gateway::RunScenario(cfg, sc);
    sim_s += sc.duration_s;
    worst = std::max(worst, res.summary.terminal_distance_m);
    if (res.summary.goal_reached && res.summary.terminal_distance_m <= 0.4) ++reached;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  return {reached == 20, fmt::format("{}/20 within 0.4 m, worst {:.3f} m, {:.0f} s simulated "
                                     "in {:.1f} s",
                                     reached, worst, sim_s, wall)};
}

// Pedestrians seen from a parked car at known spots, plus the crossing run.
Outcome PedestrianAccuracy() {
  const GatewayConfig cfg;
  std::vector<Scenario> runs;
  auto walker = [](int id, Eigen::Vector2d start, Eigen::Vector2d vel) {
    plant::PedestrianTruth p;
    p.id = id;
    p.start = start;
    p.velocity = vel;
    return p;
  };
  for (double x : {1.2, 2.0, 3.0, 4.0, 4.8}) {
    Scenario sc;
    sc.duration_s = 2.0 * x * 0.5 / 0.4;
    sc.pedestrians = {walker(1, {x, -0.5 * x}, {0.0, 0.4})};
    runs.push_back(sc);
  }
  {
    Scenario sc;  // walking straight at the camera
    sc.duration_s = 10.0;
    sc.pedestrians = {walker(1, {5.6, 0.2}, {-0.5, 0.0})};
    runs.push_back(sc);
  }
  runs.push_back(gateway::LoadScenario(PODCAR_SOURCE_DIR "/scenarios/crossing.scn"));

  int frames = 0, good = 0;
  double worst = 0.0;
  std::vector<double> errors;
  for (const Scenario& sc : runs) {
    const auto res = gateway::RunScenario(cfg, sc);
    for (const auto& obs : res.observations) {
      if (obs.range_m < 1.0 || obs.range_m > 5.0) continue;
      const double err = (obs.estimate - obs.truth).norm();
      ++frames;
      good += err <= 0.2;
      worst = std::max(worst, err);
      errors.push_back(err);
    }
  }
  std::sort(errors.begin(), errors.end());
  const double p95 = errors.empty() ? 0.0 : errors[errors.size() * 95 / 100];
  const double frac = frames ? double(good) / frames : 0.0;
  return {frames >= 100 && frac >= 0.95,
          fmt::format("{}/{} frames within 0.2 m ({:.1f}%), p95 {:.3f} m, worst {:.3f} m", good,
                      frames, 100 * frac, p95, worst)};
}

// Algebraic circle fit: x^2 + y^2 = 2ax + 2by + c.
double FitRadius(const std::vector<Eigen::Vector2d>& pts) {
  Eigen::MatrixXd a(pts.size(), 3);
  Eigen::VectorXd rhs(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    a.row(i) << 2 * pts[i].x(), 2 * pts[i].y(), 1.0;
    rhs(i) = pts[i].squaredNorm();
  }
  const Eigen::Vector3d s = a.colPivHouseholderQr().solve(rhs);
  return std::sqrt(s(2) + s(0) * s(0) + s(1) * s(1));
}

Outcome MinTurningRadius() {
  const GatewayConfig cfg;
  const Scenario sc = gateway::LoadScenario(PODCAR_SOURCE_DIR "/scenarios/full_lock.scn");
  const auto res = gateway::RunScenario(cfg, sc);
  std::vector<Eigen::Vector2d> pts;
  double delta_sum = 0.0;
  for (const auto& f : res.log) {
    if (f.t < 20.0) continue;  // past the run-up and the steering slew
    pts.emplace_back(f.x, f.y);
    delta_sum += f.delta;
  }
  const double r_fit = FitRadius(pts);
  const double delta = delta_sum / pts.size();
  const double r_logged = cfg.control.geometry.wheelbase_m / std::tan(std::abs(delta));
  const double rel = std::abs(r_fit - r_logged) / r_logged;
  const double r_min = cfg.control.geometry.min_turning_radius_m;
  return {rel <= 0.02 && r_fit >= r_min,
          fmt::format("R_fit {:.4f} m, L/tan(delta_logged) {:.4f} m ({:.2f}%), floor {:.2f} m",
                      r_fit, r_logged, 100 * rel, r_min)};
}

Outcome SafetyExhaustion() {
  using testing::FromBits;
  int cases = 0, mismatches = 0;
  for (auto s : testing::kStates) {
    for (auto m : testing::kModes) {
      for (double b : testing::kBatteries) {
        for (int bits = 0; bits < 32; ++bits) {
          const safety::SafetyInputs in = FromBits(bits, b, m);
          const safety::SafetyDecision d = safety::Tick(s, in);
          ++cases;
          mismatches += d.motor_power != testing::OracleMotorPower(s, in) ||
                        d.state != testing::OracleNext(s, in);
        }
      }
    }
  }
  // Random walk: every unsafe input cuts power on that very tick, and a
  // latch holds until a reset is accepted.
  std::mt19937_64 rng(7);
  safety::SafetySupervisor sup;
  safety::SafetyState expect = safety::SafetyState::kInit;
  int cutoff_violations = 0, latch_violations = 0, oracle_misses = 0;
  for (int i = 0; i < 100000; ++i) {
    // Biased towards the all-good input so ACTIVE is visited often.
    const int bits = rng() % 3 == 0 ? 3 : static_cast<int>(rng() % 32);
    const safety::SafetyInputs in =
        FromBits(bits, rng() % 8 == 0 ? 21.5 : 24.0,
                 rng() % 2 ? safety::DriveMode::kManual : safety::DriveMode::kAutonomous);
    if (rng() % 50 == 0) {
      const bool safe = safety::SafeToReset(in);
      try {
        sup.Reset(in);
        if (expect == safety::SafetyState::kFaultLatched) {
          oracle_misses += !safe;
          expect = safety::SafetyState::kStandby;
        }
      } catch (const Error&) {
        oracle_misses += safe;
      }
    }
    const bool was_latched = expect == safety::SafetyState::kFaultLatched;
    const safety::SafetyDecision d = sup.Tick(in);
    const bool unsafe = !in.dmh_held || in.estop_rx || in.heartbeat_stale ||
                        in.battery_v < 22.0 || in.overcurrent_trip ||
                        (in.mode == safety::DriveMode::kManual && !in.enable_held);
    cutoff_violations += unsafe && d.motor_power;
    latch_violations += was_latched && (d.motor_power || d.state != expect);
    oracle_misses += d.motor_power != testing::OracleMotorPower(expect, in);
    expect = testing::OracleNext(expect, in);
    oracle_misses += sup.state() != expect;
  }
  return {mismatches == 0 && cutoff_violations == 0 && latch_violations == 0 &&
              oracle_misses == 0,
          fmt::format("{} table cases, {} mismatches; 1e5 fuzz steps: cutoff {}, latch {}, "
                      "oracle {}",
                      cases, mismatches, cutoff_violations, latch_violations, oracle_misses)};
}

Outcome LinkLoss() {
  const GatewayConfig cfg;
  Scenario sc = gateway::LoadScenario(PODCAR_SOURCE_DIR "/scenarios/link_loss.scn");
  double t_cut = 0.0;
  for (const auto& ev : sc.events) {
    if (ev.kind == "silence_link") t_cut = ev.t;
  }
  SimRuntime rt(cfg, sc);
  double v_at_cut = 0.0;
  std::optional<double> stopped_at;
  while (!rt.Finished()) {
    rt.Step();
    if (rt.now() <= t_cut) v_at_cut = rt.truth().v;
    if (rt.now() > t_cut && !stopped_at && rt.truth().brake_engaged &&
        std::abs(rt.truth().v) < 0.01) {
      stopped_at = rt.now();
    }
  }
  const double budget = cfg.board.heartbeat_timeout_s + 0.5;
  const bool ok = v_at_cut > 0.15 && stopped_at && *stopped_at - t_cut <= budget;
  return {ok, fmt::format("v {:.3f} m/s at cut, stopped {} after, budget {:.2f} s", v_at_cut,
                          stopped_at ? fmt::format("{:.2f} s", *stopped_at - t_cut)
                                     : std::string("never"),
                          budget)};
}

Outcome ProtocolSoundness() {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> u16(0, 65535), len(0, 40), byte(0, 255), flip(1, 255);
  int roundtrip_fail = 0;
  for (int i = 0; i < 100000; ++i) {
    const wire::WireMessage m = testing::RandomMessage(rng);
    const auto seq = static_cast<std::uint16_t>(u16(rng));
    const auto decoded = wire::DecodePacket(wire::EncodePacket(m, seq));
    const auto* p = std::get_if<wire::Packet>(&decoded);
    roundtrip_fail += p == nullptr || !(*p == wire::Packet{m, seq});
  }
  int fuzz_bad = 0;
  for (int i = 0; i < 100000; ++i) {
    std::vector<std::uint8_t> b;
    if (i % 2 == 0) {
      b = wire::EncodePacket(testing::RandomMessage(rng), static_cast<std::uint16_t>(i));
      for (int k = 0, n = 1 + static_cast<int>(rng() % 4); k < n; ++k) {
        switch (rng() % 3) {
          case 0: b[rng() % b.size()] = static_cast<std::uint8_t>(byte(rng)); break;
          case 1: b.push_back(static_cast<std::uint8_t>(byte(rng))); break;
          default: if (b.size() > 1) b.pop_back();
        }
      }
    } else {
      b.resize(len(rng));
      for (auto& x : b) x = static_cast<std::uint8_t>(byte(rng));
    }
    try {
      const auto decoded = wire::DecodePacket(b);
      if (const auto* p = std::get_if<wire::Packet>(&decoded)) {
        fuzz_bad += wire::EncodePacket(p->msg, p->seq) != b;
      }
    } catch (...) {
      ++fuzz_bad;
    }
  }
  long corruptions = 0, undetected = 0;
  for (int i = 0; i < 20000; ++i) {
    const auto good = wire::EncodePacket(testing::RandomMessage(rng), static_cast<std::uint16_t>(i));
    for (std::size_t pos = 0; pos < good.size(); ++pos) {
      auto bad = good;
      bad[pos] ^= static_cast<std::uint8_t>(flip(rng));
      ++corruptions;
      undetected += std::holds_alternative<wire::Packet>(wire::DecodePacket(bad));
    }
  }
  return {roundtrip_fail == 0 && fuzz_bad == 0 && undetected == 0,
          fmt::format("1e5 round trips, {} failed; 1e5 fuzz inputs, {} unsound; {} corruptions, "
                      "{} undetected",
                      roundtrip_fail, fuzz_bad, corruptions, undetected)};
}

Outcome ScanOracle() {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<float> x(-1.0f, 6.0f), y(-4.0f, 4.0f), z(-0.2f, 1.5f);
  const perception::ScanParams p;
  int bin_mismatches = 0, floor_leaks = 0, finite = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = static_cast<int>(rng() % 501);
    perception::PointCloud cloud(n, 1);
    std::vector<bool> is_floor(n);
    for (int i = 0; i < n; ++i) {
      perception::CloudPoint pt{x(rng), y(rng), z(rng), 0};
      if (rng() % 20 == 0) pt.x = NAN;
      if (rng() % 20 == 0) pt.z = static_cast<float>(p.floor_z_max);
      cloud.Set(i, pt);
    }
    const perception::LaserScan scan = perception::CloudToScan(cloud, p);
    const std::vector<float> oracle = testing::BruteForceScan(cloud, p);
    if (scan.ranges.size() != oracle.size()) return {false, "bin count differs from oracle"};
    for (std::size_t b = 0; b < oracle.size(); ++b) {
      bin_mismatches += std::memcmp(&scan.ranges[b], &oracle[b], sizeof(float)) != 0;
      finite += std::isfinite(scan.ranges[b]);
    }
    // Every finite range must come from some non-floor point.
    for (std::size_t b = 0; b < scan.ranges.size(); ++b) {
      if (!std::isfinite(scan.ranges[b])) continue;
      bool sourced = false;
      for (std::size_t i = 0; i < cloud.size() && !sourced; ++i) {
        const auto pt = cloud.Get(i);
        sourced = pt.z > p.floor_z_max &&
                  static_cast<float>(std::hypot(double(pt.x), double(pt.y))) == scan.ranges[b];
      }
      floor_leaks += !sourced;
    }
  }
  return {bin_mismatches == 0 && floor_leaks == 0,
          fmt::format("1000 clouds, {} finite bins, {} bitwise mismatches, {} floor leaks",
                      finite, bin_mismatches, floor_leaks)};
}

Outcome CalibrationRecovery() {
  // V = 1.8 delta + 2.4 with sigma 0.02 V, 21 samples over +/-0.5 rad.
  const double kSlope = 1.8, kIntercept = 2.4, kSigma = 0.02;
  double worst_slope = 0.0, worst_icpt = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, kSigma);
    std::vector<calibration::CalibSample> s;
    for (int i = 0; i < 21; ++i) {
      const double d = -0.5 + i * 0.05;
      s.push_back({d, kSlope * d + kIntercept + noise(rng)});
    }
    const auto m = calibration::FitLinear(s);
    worst_slope = std::max(worst_slope, std::abs(m.slope - kSlope));
    worst_icpt = std::max(worst_icpt, std::abs(m.intercept - kIntercept));
  }
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst_rt = 0.0;
  for (int i = 0; i < 100000; ++i) {
    calibration::CalibrationMap m{u(rng) * 4, 2.5 + u(rng), 0.0, -100, 100};
    if (std::abs(m.slope) < 0.05) m.slope = 0.05;
    const double d = u(rng) * 0.6;
    worst_rt = std::max(worst_rt, std::abs(calibration::VoltageToAngle(
                                               m, calibration::AngleToVoltage(m, d)) - d));
  }
  return {worst_slope <= 0.05 && worst_icpt <= 0.02 && worst_rt <= 1e-9,
          fmt::format("20 seeds: slope err {:.4f} (tol 0.05), intercept err {:.4f} (tol 0.02); "
                      "round trip {:.1e} (tol 1e-9)",
                      worst_slope, worst_icpt, worst_rt)};
}

Outcome KalmanSanity() {
  using perception::KalmanPredict;
  using perception::KalmanUpdate;
  const Eigen::Matrix3d r = Eigen::Matrix3d::Identity() * 0.01;
  // Stationary target, 100 identical observations.
  const Eigen::Vector3d still(1.0, 2.0, 0.0);
  auto t = perception::NewTrack(1, Eigen::Vector3d(0.5, 1.5, 0.0), 0.0);
  for (int i = 0; i < 100; ++i) t = KalmanUpdate(KalmanPredict(t, 0.1), still, r);
  const double still_pos = (t.position - still).norm();
  const double still_vel = t.velocity.norm();
  // Noiseless walker at 1 m/s along x, dt 0.1, 50 steps.
  auto w = perception::NewTrack(2, Eigen::Vector3d::Zero(), 0.0);
  for (int k = 1; k <= 50; ++k) {
    w = KalmanUpdate(KalmanPredict(w, 0.1), Eigen::Vector3d(0.1 * k, 0.0, 0.0), r);
  }
  const double walk_vel = (w.velocity - Eigen::Vector3d(1, 0, 0)).norm();
  // Long run with erratic dt and measurement noise scales.
  std::mt19937_64 rng(61);
  std::normal_distribution<double> noise(0.0, 0.1);
  std::uniform_real_distribution<double> dt(0.0, 0.3);
  auto l = perception::NewTrack(3, Eigen::Vector3d::Zero(), 0.0);
  int non_psd = 0;
  for (int i = 0; i < 10000; ++i) {
    const double h = dt(rng);
    l = KalmanPredict(l, h);
    const double var = (i % 97 == 0) ? 1e-8 : (i % 89 == 0) ? 1e4 : 0.01;
    l = KalmanUpdate(l, Eigen::Vector3d(noise(rng), noise(rng), 0.0),
                     Eigen::Matrix3d::Identity() * var);
    non_psd += !perception::IsPsd(l.covariance);
  }
  return {still_pos < 1e-3 && still_vel < 0.01 && walk_vel < 0.05 && non_psd == 0,
          fmt::format("stationary pos {:.1e} m (tol 1e-3), vel {:.1e} m/s (tol 0.01); walker "
                      "vel err {:.4f} m/s (tol 0.05); 1e4 steps, {} non-PSD",
                      still_pos, still_vel, walk_vel, non_psd)};
}

}  // namespace
}  // namespace podcar

int main() {
  using podcar::Outcome;
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"speed_cap", podcar::SpeedCap},
      {"goal_tolerance", podcar::GoalTolerance},
      {"pedestrian_range_accuracy", podcar::PedestrianAccuracy},
      {"min_turning_radius", podcar::MinTurningRadius},
      {"safety_exhaustion", podcar::SafetyExhaustion},
      {"link_loss_fail_safe", podcar::LinkLoss},
      {"protocol_soundness", podcar::ProtocolSoundness},
      {"scan_oracle", podcar::ScanOracle},
      {"calibration_recovery", podcar::CalibrationRecovery},
      {"kalman_sanity", podcar::KalmanSanity},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
