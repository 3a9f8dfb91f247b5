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

// Independent oracles shared by the unit suites and the acceptance run.

#ifndef PODCAR_TESTS_ORACLES_H_
#define PODCAR_TESTS_ORACLES_H_

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "podcar/perception.h"
#include "podcar/safety.h"
#include "podcar/wire.h"

namespace podcar::testing {

inline constexpr safety::SafetyState kStates[] = {
    safety::SafetyState::kInit, safety::SafetyState::kStandby, safety::SafetyState::kActive,
    safety::SafetyState::kFaultLatched};
inline constexpr safety::DriveMode kModes[] = {safety::DriveMode::kManual,
                                               safety::DriveMode::kAutonomous};
inline constexpr double kBatteries[] = {21.99, 22.0};

// Written straight from the interlock's boolean definition.
inline bool OracleMotorPower(safety::SafetyState s, const safety::SafetyInputs& in) {
  return in.dmh_held && !in.estop_rx && !in.heartbeat_stale && in.battery_v >= 22.0 &&
         !in.overcurrent_trip && (in.mode == safety::DriveMode::kAutonomous || in.enable_held) &&
         s != safety::SafetyState::kFaultLatched;
}

inline safety::SafetyState OracleNext(safety::SafetyState s, const safety::SafetyInputs& in) {
  if (in.estop_rx || in.overcurrent_trip || s == safety::SafetyState::kFaultLatched) {
    return safety::SafetyState::kFaultLatched;
  }
  return OracleMotorPower(s, in) ? safety::SafetyState::kActive : safety::SafetyState::kStandby;
}

inline safety::SafetyInputs FromBits(int bits, double battery, safety::DriveMode mode) {
  safety::SafetyInputs in;
  in.dmh_held = bits & 1;
  in.enable_held = bits & 2;
  in.estop_rx = bits & 4;
  in.heartbeat_stale = bits & 8;
  in.overcurrent_trip = bits & 16;
  in.battery_v = battery;
  in.mode = mode;
  return in;
}

// Per-bin minimum by exhaustive search: every point is tested against every
// bin centre and goes to the nearest one.
inline std::vector<float> BruteForceScan(const perception::PointCloud& cloud,
                                         const perception::ScanParams& p) {
  std::vector<double> centres;
  for (int b = 0;; ++b) {
    const double c = p.angle_min + b * p.angle_increment;
    if (c > p.angle_max + 1e-9 * p.angle_increment) break;
    centres.push_back(c);
  }
  std::vector<float> ranges(centres.size(), std::numeric_limits<float>::infinity());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const perception::CloudPoint pt = cloud.Get(i);
    if (std::isnan(pt.x) || std::isnan(pt.y) || std::isnan(pt.z)) continue;
    if (!(pt.z > p.floor_z_max)) continue;
    const float r = static_cast<float>(std::hypot(double(pt.x), double(pt.y)));
    if (!(r >= static_cast<float>(p.range_min) && r <= static_cast<float>(p.range_max))) continue;
    const double a = std::atan2(double(pt.y), double(pt.x));
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < centres.size(); ++b) {
      const double d = std::abs(a - centres[b]);
      if (d <= best_d) {  // ties go to the later bin
        best_d = d;
        best = b;
      }
    }
    if (best_d > p.angle_increment / 2) continue;
    ranges[best] = std::min(ranges[best], r);
  }
  return ranges;
}

// Independent reference encoder written straight from the layout table.
inline std::vector<std::uint8_t> ReferenceEncode(std::uint8_t type, std::uint16_t seq,
                                                 const std::vector<std::uint8_t>& payload) {
  std::vector<std::uint8_t> out = {0x52,
                                   0x34,
                                   0x01,
                                   type,
                                   static_cast<std::uint8_t>(seq >> 8),
                                   static_cast<std::uint8_t>(seq & 0xFF),
                                   static_cast<std::uint8_t>(payload.size() >> 8),
                                   static_cast<std::uint8_t>(payload.size() & 0xFF)};
  for (auto b : payload) out.push_back(b);
  unsigned sum = 0;
  for (auto b : out) sum += b;
  out.push_back(static_cast<std::uint8_t>((sum >> 8) & 0xFF));
  out.push_back(static_cast<std::uint8_t>(sum & 0xFF));
  return out;
}

inline wire::WireMessage RandomMessage(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 5);
  std::uniform_int_distribution<int> units(-400, 400);
  std::uniform_int_distribution<int> u16(0, 65535);
  std::uniform_int_distribution<int> i16(-32768, 32767);
  std::uniform_int_distribution<int> ch(0, 7);
  std::uniform_int_distribution<int> flags(0, 15);
  switch (kind(rng)) {
    case 0:
      return wire::Heartbeat{};
    case 1:
      return wire::DriveCmd{static_cast<std::int16_t>(units(rng))};
    case 2:
      return wire::SteerCmd{static_cast<std::uint16_t>(u16(rng))};
    case 3:
      return wire::RelayCmd{static_cast<std::uint8_t>(ch(rng)), (u16(rng) & 1) != 0};
    case 4:
      return wire::EStop{};
    default:
      return wire::Telemetry{
          static_cast<std::uint16_t>(u16(rng)), static_cast<std::int16_t>(i16(rng)),
          static_cast<std::uint8_t>(flags(rng)), static_cast<std::uint16_t>(u16(rng))};
  }
}

}  // namespace podcar::testing

#endif  // PODCAR_TESTS_ORACLES_H_
