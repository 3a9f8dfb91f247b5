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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

namespace podcar::plant {
namespace {

using perception::CameraIntrinsics;
using perception::CameraMount;

PlantState Parked() { return InitialState(PlantConfig{}); }

TEST(SynthScene, EmptyWorldHasNoReturns) {
  const SceneFrame f = SynthScene(Parked(), {}, {}, CameraIntrinsics{}, CameraMount{});
  for (float d : f.depth.depth) ASSERT_FALSE(perception::ValidDepth(d));
  for (std::size_t i = 0; i < f.cloud.size(); ++i) ASSERT_TRUE(std::isnan(f.cloud.Get(i).x));
  EXPECT_TRUE(f.detections.empty());
}

TEST(SynthScene, FloorFillsLowerRowsOnly) {
  SceneOptions opt;
  opt.render_floor = true;
  const CameraIntrinsics k;
  const SceneFrame f = SynthScene(Parked(), {}, {}, k, CameraMount{}, opt);
  // Level camera: rows above the horizon never see the floor.
  for (int v = 0; v <= 119; ++v) ASSERT_FALSE(perception::ValidDepth(f.depth.at(160, v)));
  // Row 239 sees the floor at depth h * fy / (v - cy).
  EXPECT_NEAR(f.depth.at(160, 239), 0.9 * k.fy / (239 - k.cy), 1e-5);
}

TEST(SynthScene, CubeFaceDepth) {
  // Unit cube centred 2 m ahead of the camera at camera height.
  const std::vector<SceneBox> boxes{{Eigen::Vector3d(1.2 + 2.0, 0.0, 0.9), Eigen::Vector3d::Ones()}};
  const SceneFrame f = SynthScene(Parked(), boxes, {}, CameraIntrinsics{}, CameraMount{});
  EXPECT_NEAR(f.depth.at(160, 120), 1.5, 1e-6);
  EXPECT_NEAR(f.depth.at(159, 119), 1.5, 1e-6);
  // The face spans +-0.5 m at 1.5 m: about 110 px either side of centre.
  EXPECT_NEAR(f.depth.at(159 + 100, 119), 1.5, 1e-6);
  EXPECT_FALSE(perception::ValidDepth(f.depth.at(159 + 120, 119)));
  const perception::CloudPoint p = f.cloud.Get(120 * 320 + 160);
  EXPECT_NEAR(p.z, 1.5, 1e-6);
  EXPECT_NEAR(p.x, (160 - 159.5) * 1.5 / 330.0, 1e-6);
}

TEST(SynthScene, PedestrianStraightAheadIsCentred) {
  const std::vector<PedestrianTruth> peds{{7, Eigen::Vector2d(3.0, 0.0)}};
  const CameraIntrinsics k;
  const SceneFrame f = SynthScene(Parked(), {}, peds, k, CameraMount{});
  ASSERT_EQ(f.detections.size(), 1u);
  const GroundTruthDetection& d = f.detections[0];
  EXPECT_EQ(d.pedestrian_id, 7);
  EXPECT_DOUBLE_EQ(d.box.u_center, k.cx);
  EXPECT_TRUE(d.box.InImage(k.width, k.height));
  // Nearest surface point is 3 - 1.2 - 0.2 = 1.6 m ahead of the camera.
  EXPECT_NEAR(f.depth.at(159, 119), 1.6, 1e-3);
  EXPECT_EQ(d.position, Eigen::Vector2d(3.0, 0.0));
}

TEST(SynthScene, PedestrianOutsideRangeIsNotSeen) {
  const std::vector<PedestrianTruth> peds{{1, Eigen::Vector2d(20.0, 0.0)}};
  const SceneFrame f = SynthScene(Parked(), {}, peds, CameraIntrinsics{}, CameraMount{});
  EXPECT_TRUE(f.detections.empty());
}

TEST(SynthScene, FollowsVehiclePose) {
  // Turn the vehicle 90 degrees left: a pedestrian at (0, 3) is now ahead.
  PlantState s = Parked();
  s.theta = M_PI / 2;
  const std::vector<PedestrianTruth> peds{{1, Eigen::Vector2d(0.0, 3.0)}};
  const CameraIntrinsics k;
  const SceneFrame f = SynthScene(s, {}, peds, k, CameraMount{});
  ASSERT_EQ(f.detections.size(), 1u);
  EXPECT_NEAR(f.detections[0].box.u_center, k.cx, 0.5);
}

TEST(PedestrianTruth, WalksFromStartTime) {
  PedestrianTruth p{1, Eigen::Vector2d(1, 2), Eigen::Vector2d(0.5, -1), 2.0};
  EXPECT_EQ(p.PositionAt(0.0), Eigen::Vector2d(1, 2));
  EXPECT_EQ(p.PositionAt(4.0), Eigen::Vector2d(2, 0));
}

TEST(PedestrianFacingPoint, OnOutlineTowardsCamera) {
  PedestrianTruth p{1, Eigen::Vector2d(3, 0)};
  EXPECT_TRUE(PedestrianFacingPoint(p, 0, Eigen::Vector2d(1.2, 0)).isApprox(Eigen::Vector2d(2.8, 0)));
  EXPECT_EQ(PedestrianFacingPoint(p, 0, Eigen::Vector2d(3.1, 0)), Eigen::Vector2d(3, 0));
}

TEST(CameraPointToWorld, MatchesRayCast) {
  // A camera-frame point recovered from a rendered pixel lands on the object.
  PlantState s = Parked();
  s.x = 1.0;
  s.y = -2.0;
  s.theta = 0.3;
  const CameraIntrinsics k;
  const CameraMount m;
  const std::vector<SceneBox> boxes{{Eigen::Vector3d(5.0, -0.5, 0.9), Eigen::Vector3d(0.2, 4.0, 2.0)}};
  const SceneFrame f = SynthScene(s, boxes, {}, k, m);
  const perception::CloudPoint p = f.cloud.Get(119 * 320 + 159);
  ASSERT_TRUE(std::isfinite(p.z));
  const Eigen::Vector3d w =
      CameraPointToWorld(Eigen::Vector3d(p.x, p.y, p.z), {s.x, s.y, s.theta}, m, k);
  EXPECT_NEAR(w.x(), 4.9, 1e-5);  // near face of the wall
  EXPECT_NEAR(w.z(), 0.9 - (119 - k.cy) / k.fy * p.z, 1e-5);
}

}  // namespace
}  // namespace podcar::plant
