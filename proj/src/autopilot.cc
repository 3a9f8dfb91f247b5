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

#include "podcar/autopilot.h"

#include <algorithm>
#include <cmath>

namespace podcar::gateway {

AutopilotOutput AutopilotTick(const kinematics::Pose2& pose, const PursuitPath& path,
                              const AutopilotParams& params) {
  AutopilotOutput out;
  const double gx = path.goal.x - pose.x;
  const double gy = path.goal.y - pose.y;
  out.distance_to_goal = std::hypot(gx, gy);
  if (out.distance_to_goal <= params.goal_tol) {
    out.done = true;
    return out;
  }

  double ux = path.goal.x - path.start_x;
  double uy = path.goal.y - path.start_y;
  const double length = std::hypot(ux, uy);
  double target_x = path.goal.x;
  double target_y = path.goal.y;
  if (length > 1e-9) {
    ux /= length;
    uy /= length;
    const double rx = pose.x - path.start_x;
    const double ry = pose.y - path.start_y;
    const double along = rx * ux + ry * uy;
    if (along >= length) {
      // Past the goal line; stopping beats circling back.
      out.done = true;
      return out;
    }
    const double cross = -rx * uy + ry * ux;
    const double reach = std::sqrt(std::max(0.0, params.lookahead * params.lookahead - cross * cross));
    const double s = std::min(length, along + reach);
    target_x = path.start_x + ux * s;
    target_y = path.start_y + uy * s;
  }

  const double bearing = std::atan2(target_y - pose.y, target_x - pose.x);
  const double alpha = std::remainder(bearing - pose.theta, 2.0 * M_PI);
  const double curvature = 2.0 * std::sin(alpha) / params.lookahead;
  out.cmd.vx = params.cruise;
  out.cmd.wz = params.cruise * curvature;
  return out;
}

}  // namespace podcar::gateway
