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

// Ray-cast depth camera for the simulated vehicle. World frame is x/y on the
// ground, z up.

#ifndef PODCAR_SCENE_H_
#define PODCAR_SCENE_H_

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "podcar/perception.h"
#include "podcar/plant.h"

namespace podcar::plant {

// Axis-aligned box in the world.
struct SceneBox {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d size = Eigen::Vector3d::Ones();
};

// Upright cylinder standing at `start`, walking at `velocity` from t_start.
struct PedestrianTruth {
  int id = 0;
  Eigen::Vector2d start = Eigen::Vector2d::Zero();
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
  double t_start = 0.0;
  double radius = 0.2;
  double height = 1.7;

  Eigen::Vector2d PositionAt(double t) const;
};

struct SceneOptions {
  bool render_floor = false;
  double max_range_m = 10.0;  // sensor cut-off
};

struct GroundTruthDetection {
  int pedestrian_id = 0;
  perception::Box2D box;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();  // world, axis centre
};

struct SceneFrame {
  perception::DepthImage depth;
  perception::PointCloud cloud;  // camera frame
  std::vector<GroundTruthDetection> detections;
};

struct CameraPose {
  Eigen::Vector3d origin;
  perception::CameraIntrinsics intrinsics;
  double yaw = 0.0;
};

CameraPose CameraPoseFor(const kinematics::Pose2& pose,
                         const perception::CameraMount& mount,
                         const perception::CameraIntrinsics& k);

SceneFrame SynthScene(const PlantState& state, std::span<const SceneBox> obstacles,
                      std::span<const PedestrianTruth> pedestrians,
                      const perception::CameraIntrinsics& k,
                      const perception::CameraMount& mount,
                      const SceneOptions& options = {});

// Point on the pedestrian's outline nearest the camera in the ground plane;
// what a tape measure from the camera would reach.
Eigen::Vector2d PedestrianFacingPoint(const PedestrianTruth& ped, double t,
                                      const Eigen::Vector2d& camera_xy);

// Camera-frame point to world x/y/z for the given vehicle pose.
Eigen::Vector3d CameraPointToWorld(const Eigen::Vector3d& p,
                                   const kinematics::Pose2& pose,
                                   const perception::CameraMount& mount,
                                   const perception::CameraIntrinsics& k);

}  // namespace podcar::plant

#endif  // PODCAR_SCENE_H_
