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

// Minimal waypoint follower: pure pursuit along the straight segment from
// where the goal was accepted to the goal.

#ifndef PODCAR_AUTOPILOT_H_
#define PODCAR_AUTOPILOT_H_

#include "podcar/kinematics.h"

namespace podcar::gateway {

struct AutopilotParams {
  double lookahead = 1.5;  // m
  double cruise = 0.15;    // m/s
  double goal_tol = 0.35;  // m
};

struct Goal {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // accepted, not tracked
};

struct PursuitPath {
  double start_x = 0.0;
  double start_y = 0.0;
  Goal goal;
};

struct AutopilotOutput {
  kinematics::VelocityCommand cmd;
  bool done = false;
  double distance_to_goal = 0.0;
};

AutopilotOutput AutopilotTick(const kinematics::Pose2& pose, const PursuitPath& path,
                              const AutopilotParams& params = {});

}  // namespace podcar::gateway

#endif  // PODCAR_AUTOPILOT_H_
