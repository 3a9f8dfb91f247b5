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

// Twist to Ackermann conversion for a car-like vehicle, using a single
// virtual front wheel at the centre of the front axle. Positive angles and
// positive radii turn left; a right turn has a negative radius.

#ifndef PODCAR_KINEMATICS_H_
#define PODCAR_KINEMATICS_H_

namespace podcar::kinematics {

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

struct VehicleGeometry {
  double wheelbase_m = 1.3;  // must be measured on the vehicle
  double track_m = 0.64;     // must be measured on the vehicle
  double min_turning_radius_m = 2.05;

  // Largest virtual-wheel angle that respects the minimum turning radius.
  double MaxSteerDelta() const;

  // Throws Error(kDegenerateGeometry) on non-positive dimensions or when the
  // minimum radius puts the turning centre inside the axle.
  void Validate() const;
};

struct VelocityCommand {
  double vx = 0.0;  // m/s, forward positive
  double wz = 0.0;  // rad/s, counter-clockwise positive
};

struct AckermannCommand {
  double speed = 0.0;  // m/s
  double delta = 0.0;  // rad, virtual front wheel, positive left
};

struct TwistParams {
  // Below this forward speed a twist is treated as turn-on-the-spot.
  double v_eps = 0.01;
  // Yaw rate mapped to full lock while dry steering.
  double wz_full = 1.0;
};

struct WheelAngles {
  double inner = 0.0;
  double outer = 0.0;
};

// vx / wz, or +infinity when wz == 0.
double TurningRadius(double vx, double wz);

AckermannCommand TwistToAckermann(const VelocityCommand& cmd,
                                  const VehicleGeometry& geom,
                                  const TwistParams& params = {});

// Inner is the wheel nearer the turning centre. Throws
// Error(kDegenerateGeometry) if the implied radius is within half a track.
WheelAngles ComputeWheelAngles(double delta, const VehicleGeometry& geom);

AckermannCommand EnforceMinRadius(const AckermannCommand& cmd,
                                  const VehicleGeometry& geom);

}  // namespace podcar::kinematics

#endif  // PODCAR_KINEMATICS_H_
