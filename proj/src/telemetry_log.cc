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

#include "podcar/telemetry_log.h"

#include <ostream>

#include <fmt/format.h>

#include "podcar/error.h"

namespace podcar::gateway {

std::string TelemetryCsvHeader() {
  return "t,x,y,theta,v,delta,mode,safety_state,safety_reason,motor_power,"
         "brake_engaged,link_stale,steer_feedback_v,steer_target_v,motor_units,"
         "battery_v,active_tracks,pedestrian_stop,goal_active,distance_to_goal";
}

std::string TelemetryCsvRow(const TelemetryFrame& f) {
  return fmt::format(
      "{:.3f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{},{},{},{:d},{:d},{:d},{:.3f},"
      "{:.3f},{},{:.2f},{},{:d},{:d},{:.4f}",
      f.t, f.x, f.y, f.theta, f.v, f.delta, safety::DriveModeName(f.mode),
      safety::SafetyStateName(f.safety_state),
      safety::SafetyReasonName(f.safety_reason), f.motor_power, f.brake_engaged,
      f.link_stale, f.steer_feedback_v, f.steer_target_v, f.motor_units,
      f.battery_v, f.active_tracks, f.pedestrian_stop, f.goal_active,
      f.distance_to_goal);
}

void WriteTelemetryCsv(std::ostream& out, std::span<const TelemetryFrame> frames) {
  TelemetryCsvWriter writer(out);
  for (const auto& frame : frames) writer.Append(frame);
}

TelemetryCsvWriter::TelemetryCsvWriter(std::ostream& out) : out_(out) {
  out_ << TelemetryCsvHeader() << '\n';
}

void TelemetryCsvWriter::Append(const TelemetryFrame& frame) {
  if (frame.t < last_t_) {
    throw Error(ErrorCode::kBadInput,
                fmt::format("telemetry time went backwards: {} < {}", frame.t, last_t_));
  }
  last_t_ = frame.t;
  out_ << TelemetryCsvRow(frame) << '\n';
}

}  // namespace podcar::gateway
