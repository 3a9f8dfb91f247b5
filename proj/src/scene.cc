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

#include "podcar/scene.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Geometry>

namespace podcar::plant {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint32_t kObstacleColour = 0xFF808080u;
constexpr std::uint32_t kPedestrianColour = 0xFF2020E0u;
constexpr std::uint32_t kFloorColour = 0xFF406040u;

// Entry distance of the ray into the box, or +inf. Rays starting inside a
// box do not see it.
double HitBox(const Eigen::Vector3d& o, const Eigen::Vector3d& d, const SceneBox& box) {
  const Eigen::Vector3d lo = box.center - box.size / 2.0;
  const Eigen::Vector3d hi = box.center + box.size / 2.0;
  double t_near = -kInf;
  double t_far = kInf;
  for (int axis = 0; axis < 3; ++axis) {
    if (std::abs(d[axis]) < 1e-12) {
      if (o[axis] < lo[axis] || o[axis] > hi[axis]) return kInf;
      continue;
    }
    double t1 = (lo[axis] - o[axis]) / d[axis];
    double t2 = (hi[axis] - o[axis]) / d[axis];
    if (t1 > t2) std::swap(t1, t2);
    t_near = std::max(t_near, t1);
    t_far = std::min(t_far, t2);
  }
  if (t_near > t_far || t_near <= 0.0) return kInf;
  return t_near;
}

double HitCylinder(const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                   const Eigen::Vector2d& centre, double radius, double height) {
  double best = kInf;
  const double ox = o.x() - centre.x();
  const double oy = o.y() - centre.y();
  const double a = d.x() * d.x() + d.y() * d.y();
  if (a > 1e-15) {
    const double b = ox * d.x() + oy * d.y();
    const double c = ox * ox + oy * oy - radius * radius;
    const double disc = b * b - a * c;
    if (disc >= 0.0) {
      const double t = (-b - std::sqrt(disc)) / a;
      const double z = o.z() + t * d.z();
      if (t > 0.0 && z >= 0.0 && z <= height) best = t;
    }
  }
  if (std::abs(d.z()) > 1e-12) {
    const double t = (height - o.z()) / d.z();
    const double x = ox + t * d.x();
    const double y = oy + t * d.y();
    if (t > 0.0 && x * x + y * y <= radius * radius) best = std::min(best, t);
  }
  return best;
}

}  // namespace

Eigen::Vector2d PedestrianTruth::PositionAt(double t) const {
  return start + velocity * std::max(0.0, t - t_start);
}

CameraPose CameraPoseFor(const kinematics::Pose2& pose,
                         const perception::CameraMount& mount,
                         const perception::CameraIntrinsics& k) {
  CameraPose cam;
  cam.origin = Eigen::Vector3d(pose.x + mount.forward_m * std::cos(pose.theta),
                               pose.y + mount.forward_m * std::sin(pose.theta),
                               mount.height_m);
  cam.intrinsics = k;
  cam.yaw = pose.theta;
  return cam;
}

Eigen::Vector3d CameraPointToWorld(const Eigen::Vector3d& p,
                                   const kinematics::Pose2& pose,
                                   const perception::CameraMount& mount,
                                   const perception::CameraIntrinsics& k) {
  const CameraPose cam = CameraPoseFor(pose, mount, k);
  const Eigen::Vector3d level = perception::CameraDirToLevel(p, k);
  return cam.origin + Eigen::AngleAxisd(pose.theta, Eigen::Vector3d::UnitZ()) * level;
}

Eigen::Vector2d PedestrianFacingPoint(const PedestrianTruth& ped, double t,
                                      const Eigen::Vector2d& camera_xy) {
  const Eigen::Vector2d centre = ped.PositionAt(t);
  const Eigen::Vector2d to_cam = camera_xy - centre;
  const double dist = to_cam.norm();
  if (dist <= ped.radius) return centre;
  return centre + to_cam / dist * ped.radius;
}

SceneFrame SynthScene(const PlantState& state, std::span<const SceneBox> obstacles,
                      std::span<const PedestrianTruth> pedestrians,
                      const perception::CameraIntrinsics& k,
                      const perception::CameraMount& mount,
                      const SceneOptions& options) {
  const kinematics::Pose2 pose{state.x, state.y, state.theta};
  const CameraPose cam = CameraPoseFor(pose, mount, k);
  const Eigen::Matrix3d cam_to_world =
      Eigen::AngleAxisd(pose.theta, Eigen::Vector3d::UnitZ()).toRotationMatrix() *
      perception::CameraToLevelRotation(k);

  std::vector<Eigen::Vector2d> ped_xy;
  ped_xy.reserve(pedestrians.size());
  for (const auto& ped : pedestrians) ped_xy.push_back(ped.PositionAt(state.t));

  struct Extent {
    int u0 = std::numeric_limits<int>::max(), v0 = std::numeric_limits<int>::max();
    int u1 = -1, v1 = -1;
  };
  std::vector<Extent> extents(pedestrians.size());

  SceneFrame frame;
  frame.depth = perception::DepthImage(k.width, k.height);
  frame.cloud = perception::PointCloud(k.width, k.height);

  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      // Unnormalised ray with unit optical-axis component, so the hit
      // parameter is the depth itself.
      const Eigen::Vector3d ray_cam((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
      const Eigen::Vector3d dir = cam_to_world * ray_cam;

      double best = kInf;
      int hit_ped = -1;
      std::uint32_t colour = 0;
      for (const SceneBox& box : obstacles) {
        const double t = HitBox(cam.origin, dir, box);
        if (t < best) {
          best = t;
          hit_ped = -1;
          colour = kObstacleColour;
        }
      }
      for (std::size_t i = 0; i < pedestrians.size(); ++i) {
        const double t = HitCylinder(cam.origin, dir, ped_xy[i], pedestrians[i].radius,
                                     pedestrians[i].height);
        if (t < best) {
          best = t;
          hit_ped = static_cast<int>(i);
          colour = kPedestrianColour;
        }
      }
      if (options.render_floor && dir.z() < -1e-12) {
        const double t = -cam.origin.z() / dir.z();
        if (t > 0.0 && t < best) {
          best = t;
          hit_ped = -1;
          colour = kFloorColour;
        }
      }
      if (!(best <= options.max_range_m)) continue;

      const auto depth = static_cast<float>(best);
      frame.depth.at(u, v) = depth;
      frame.cloud.Set(std::size_t(v) * k.width + u,
                      {static_cast<float>(ray_cam.x() * best),
                       static_cast<float>(ray_cam.y() * best), depth, colour});
      if (hit_ped >= 0) {
        Extent& e = extents[hit_ped];
        e.u0 = std::min(e.u0, u);
        e.u1 = std::max(e.u1, u);
        e.v0 = std::min(e.v0, v);
        e.v1 = std::max(e.v1, v);
      }
    }
  }

  for (std::size_t i = 0; i < pedestrians.size(); ++i) {
    const Extent& e = extents[i];
    if (e.u1 < 0) continue;
    GroundTruthDetection det;
    det.pedestrian_id = pedestrians[i].id;
    det.box.u_center = 0.5 * (e.u0 + e.u1);
    det.box.v_center = 0.5 * (e.v0 + e.v1);
    det.box.w = e.u1 - e.u0 + 1;
    det.box.h = e.v1 - e.v0 + 1;
    det.box.class_id = 0;  // person
    det.box.confidence = 1.0;
    det.position = ped_xy[i];
    frame.detections.push_back(det);
  }
  return frame;
}

}  // namespace podcar::plant
