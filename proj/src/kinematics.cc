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

#include "podcar/kinematics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "podcar/error.h"

namespace podcar::kinematics {
namespace {

constexpr double kWzEps = 1e-9;

}  // namespace

double VehicleGeometry::MaxSteerDelta() const {
  return std::atan(wheelbase_m / min_turning_radius_m);
}

void VehicleGeometry::Validate() const {
  if (!(wheelbase_m > 0.0) || !(track_m >= 0.0) ||
      !(min_turning_radius_m > 0.0)) {
    throw Error(ErrorCode::kDegenerateGeometry,
                "wheelbase and minimum radius must be positive, track "
                "non-negative");
  }
  if (!(min_turning_radius_m > track_m / 2.0)) {
    throw Error(ErrorCode::kDegenerateGeometry,
                "minimum turning radius " +
                    std::to_string(min_turning_radius_m) +
                    " m places the turning centre inside the axle");
  }
}

double TurningRadius(double vx, double wz) {
  if (wz == 0.0) return std::numeric_limits<double>::infinity();
  return vx / wz;
}

AckermannCommand TwistToAckermann(const VelocityCommand& cmd,
                                  const VehicleGeometry& geom,
                                  const TwistParams& params) {
  const double max_delta = geom.MaxSteerDelta();
  if (std::abs(cmd.vx) >= params.v_eps) {
    const double delta = std::atan(geom.wheelbase_m * cmd.wz / cmd.vx);
    return {cmd.vx, std::clamp(delta, -max_delta, max_delta)};
  }
  if (std::abs(cmd.wz) > kWzEps) {
    // Dry steer: turn the wheels in place.
    const double fraction = std::clamp(cmd.wz / params.wz_full, -1.0, 1.0);
    return {0.0, fraction * max_delta};
  }
  return {0.0, 0.0};
}

WheelAngles ComputeWheelAngles(double delta, const VehicleGeometry& geom) {
  if (delta == 0.0) return {0.0, 0.0};
  const double radius = geom.wheelbase_m / std::tan(std::abs(delta));
  const double half_track = geom.track_m / 2.0;
  if (radius <= half_track) {
    throw Error(ErrorCode::kDegenerateGeometry,
                "turning centre inside the axle (R=" + std::to_string(radius) +
                    " m)");
  }
  const double sign = delta > 0.0 ? 1.0 : -1.0;
  return {sign * std::atan(geom.wheelbase_m / (radius - half_track)),
          sign * std::atan(geom.wheelbase_m / (radius + half_track))};
}

AckermannCommand EnforceMinRadius(const AckermannCommand& cmd,
                                  const VehicleGeometry& geom) {
  const double max_delta = geom.MaxSteerDelta();
  return {cmd.speed, std::clamp(cmd.delta, -max_delta, max_delta)};
}

}  // namespace podcar::kinematics
