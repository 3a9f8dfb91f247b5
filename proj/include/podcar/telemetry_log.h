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

#ifndef PODCAR_TELEMETRY_LOG_H_
#define PODCAR_TELEMETRY_LOG_H_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "podcar/safety.h"

namespace podcar::gateway {

// One control tick as seen by the gateway.
struct TelemetryFrame {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v = 0.0;
  double delta = 0.0;
  safety::DriveMode mode = safety::DriveMode::kManual;
  safety::SafetyState safety_state = safety::SafetyState::kInit;
  safety::SafetyReason safety_reason = safety::SafetyReason::kOk;
  bool motor_power = false;
  bool brake_engaged = true;
  bool link_stale = false;
  double steer_feedback_v = 0.0;
  double steer_target_v = 0.0;
  int motor_units = 0;
  double battery_v = 0.0;
  int active_tracks = 0;
  bool pedestrian_stop = false;
  bool goal_active = false;
  double distance_to_goal = 0.0;
};

// CSV with a header row; columns in declaration order.
std::string TelemetryCsvHeader();
std::string TelemetryCsvRow(const TelemetryFrame& frame);
void WriteTelemetryCsv(std::ostream& out, std::span<const TelemetryFrame> frames);

// Streams frames to a CSV file as they are produced.
class TelemetryCsvWriter {
 public:
  explicit TelemetryCsvWriter(std::ostream& out);
  void Append(const TelemetryFrame& frame);

 private:
  std::ostream& out_;
  double last_t_ = -1e300;
};

}  // namespace podcar::gateway

#endif  // PODCAR_TELEMETRY_LOG_H_
