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

#include "podcar/perception.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "podcar/error.h"

namespace podcar::perception {
namespace {

static_assert(std::endian::native == std::endian::little,
              "point cloud chunks are stored little-endian");

constexpr float kNaN = std::numeric_limits<float>::quiet_NaN();

void PutF32(std::uint8_t* out, float value) {
  const auto bits = std::bit_cast<std::uint32_t>(value);
  for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(bits >> (8 * i));
}

std::uint32_t GetU32(const std::uint8_t* in) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= std::uint32_t(in[i]) << (8 * i);
  return bits;
}

// Unit vectors of the camera axes expressed in the level frame.
struct CameraAxes {
  Eigen::Vector3d right;
  Eigen::Vector3d down;
  Eigen::Vector3d forward;
};

CameraAxes AxesFor(double pitch) {
  const double c = std::cos(pitch);
  const double s = std::sin(pitch);
  return {Eigen::Vector3d(0.0, -1.0, 0.0), Eigen::Vector3d(-s, 0.0, -c),
          Eigen::Vector3d(c, 0.0, -s)};
}

double Median(std::vector<float>& values) {
  const std::size_t n = values.size();
  const std::size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

Matrix6d Symmetrize(const Matrix6d& m) { return 0.5 * (m + m.transpose()); }

void RequirePsd(const Matrix6d& m, const char* where) {
  if (!IsPsd(m)) {
    throw Error(ErrorCode::kNonPsdCovariance,
                std::string("covariance lost PSD after ") + where);
  }
}

}  // namespace

void CameraIntrinsics::Validate() const {
  if (!(fx > 0.0) || !(fy > 0.0) || width <= 0 || height <= 0 ||
      !(cx < width) || !(cy < height) || !(range_min < range_max)) {
    throw Error(ErrorCode::kBadConfig,
                "camera intrinsics need fx, fy > 0, principal point inside the "
                "image and range_min < range_max");
  }
}

PointCloud::PointCloud(int width, int height)
    : width_(width), height_(height), data_(size() * kPointStep, 0) {
  for (std::size_t i = 0; i < size(); ++i) Set(i, {kNaN, kNaN, kNaN, 0});
}

CloudPoint PointCloud::GetPortable(const std::uint8_t* p) {
  return {std::bit_cast<float>(GetU32(p)), std::bit_cast<float>(GetU32(p + 4)),
          std::bit_cast<float>(GetU32(p + 8)), GetU32(p + 12)};
}

void PointCloud::SetPortable(std::uint8_t* p, const CloudPoint& point) {
  PutF32(p, point.x);
  PutF32(p + 4, point.y);
  PutF32(p + 8, point.z);
  for (int i = 0; i < 4; ++i) p[12 + i] = static_cast<std::uint8_t>(point.rgba >> (8 * i));
  std::fill(p + 16, p + 20, 0);
}

PointCloud PointCloud::FromBytes(int width, int height,
                                 std::span<const std::uint8_t> bytes) {
  if (width < 0 || height < 0 ||
      bytes.size() != std::size_t(width) * height * kPointStep) {
    throw Error(ErrorCode::kBadInput,
                fmt::format("cloud of {}x{} needs {} bytes, got {}", width,
                            height, std::size_t(width) * height * kPointStep,
                            bytes.size()));
  }
  PointCloud cloud;
  cloud.width_ = width;
  cloud.height_ = height;
  cloud.data_.assign(bytes.begin(), bytes.end());
  return cloud;
}

std::size_t LaserScan::BinCount(double angle_min, double angle_max,
                                double angle_increment) {
  // The epsilon absorbs representation error in e.g. 0.9 / 0.005.
  return static_cast<std::size_t>(
             std::floor((angle_max - angle_min) / angle_increment + 1e-9)) +
         1;
}

bool Box2D::InImage(int width, int height) const {
  return w > 0.0 && h > 0.0 && u_center - w / 2.0 >= -0.5 &&
         v_center - h / 2.0 >= -0.5 && u_center + w / 2.0 <= width - 0.5 &&
         v_center + h / 2.0 <= height - 0.5;
}

PixelRect CoveredPixels(const Box2D& box, int width, int height) {
  PixelRect r;
  r.u0 = std::max(0, static_cast<int>(std::ceil(box.u_center - box.w / 2.0 + 0.5)));
  r.u1 = std::min(width - 1, static_cast<int>(std::floor(box.u_center + box.w / 2.0 - 0.5)));
  r.v0 = std::max(0, static_cast<int>(std::ceil(box.v_center - box.h / 2.0 + 0.5)));
  r.v1 = std::min(height - 1, static_cast<int>(std::floor(box.v_center + box.h / 2.0 - 0.5)));
  return r;
}

PointCloud DepthToCloud(const DepthImage& depth, const CameraIntrinsics& k) {
  PointCloud cloud(depth.width, depth.height);
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      const float z = depth.at(u, v);
      if (!ValidDepth(z)) continue;
      const double x = (u - k.cx) * z / k.fx;
      const double y = (v - k.cy) * z / k.fy;
      cloud.Set(std::size_t(v) * depth.width + u,
                {static_cast<float>(x), static_cast<float>(y), z, 0xFFFFFFFFu});
    }
  }
  return cloud;
}

Eigen::Matrix3d CameraToLevelRotation(const CameraIntrinsics& k) {
  const CameraAxes axes = AxesFor(k.pitch_offset);
  Eigen::Matrix3d r;
  r << axes.right, axes.down, axes.forward;
  return r;
}

Eigen::Vector3d CameraDirToLevel(const Eigen::Vector3d& d,
                                 const CameraIntrinsics& k) {
  return CameraToLevelRotation(k) * d;
}

Eigen::Vector3d CameraToLevel(const Eigen::Vector3d& p, const CameraIntrinsics& k,
                              const CameraMount& mount) {
  return CameraDirToLevel(p, k) + Eigen::Vector3d(0.0, 0.0, mount.height_m);
}

PointCloud CameraCloudToLevel(const PointCloud& cloud, const CameraIntrinsics& k,
                              const CameraMount& mount) {
  PointCloud out(cloud.width(), cloud.height());
  const Eigen::Matrix3d r = CameraToLevelRotation(k);
  const Eigen::Vector3d lift(0.0, 0.0, mount.height_m);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const CloudPoint p = cloud.Get(i);
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) continue;
    const Eigen::Vector3d q = r * Eigen::Vector3d(p.x, p.y, p.z) + lift;
    out.Set(i, {static_cast<float>(q.x()), static_cast<float>(q.y()),
                static_cast<float>(q.z()), p.rgba});
  }
  return out;
}

LaserScan CloudToScan(const PointCloud& cloud, const ScanParams& params) {
  LaserScan scan;
  scan.angle_min = params.angle_min;
  scan.angle_max = params.angle_max;
  scan.angle_increment = params.angle_increment;
  scan.range_min = params.range_min;
  scan.range_max = params.range_max;
  const std::size_t bins =
      LaserScan::BinCount(params.angle_min, params.angle_max, params.angle_increment);
  scan.ranges.assign(bins, std::numeric_limits<float>::infinity());

  const auto range_min = static_cast<float>(params.range_min);
  const auto range_max = static_cast<float>(params.range_max);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const CloudPoint p = cloud.Get(i);
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) continue;
    if (p.z <= params.floor_z_max) continue;  // floor contact
    const auto range = static_cast<float>(std::hypot(double(p.x), double(p.y)));
    if (range < range_min || range > range_max) continue;
    const double angle = std::atan2(double(p.y), double(p.x));
    const double slot = std::floor((angle - params.angle_min) / params.angle_increment + 0.5);
    if (slot < 0.0 || slot >= static_cast<double>(bins)) continue;
    float& cell = scan.ranges[static_cast<std::size_t>(slot)];
    cell = std::min(cell, range);
  }
  return scan;
}

Box3D ProjectTo3d(const Box2D& box, const DepthImage& depth,
                  const CameraIntrinsics& k, const ProjectionParams& params) {
  if (!box.InImage(depth.width, depth.height)) {
    throw Error(ErrorCode::kBadInput,
                fmt::format("box ({}, {}, {}x{}) outside {}x{} image",
                            box.u_center, box.v_center, box.w, box.h,
                            depth.width, depth.height));
  }
  Box2D centre = box;
  centre.w = box.w / 2.0;
  centre.h = box.h / 2.0;
  const PixelRect rect = CoveredPixels(centre, depth.width, depth.height);

  std::vector<float> valid;
  for (int v = rect.v0; v <= rect.v1; ++v) {
    for (int u = rect.u0; u <= rect.u1; ++u) {
      const float d = depth.at(u, v);
      if (ValidDepth(d)) valid.push_back(d);
    }
  }
  if (valid.empty()) {
    throw Error(ErrorCode::kNoValidDepth,
                fmt::format("no valid depth inside box centred at ({}, {})",
                            box.u_center, box.v_center));
  }
  const double z = Median(valid);
  Box3D out;
  out.z = z;
  out.x = (box.u_center - k.cx) * z / k.fx;
  out.y = (box.v_center - k.cy) * z / k.fy;
  out.width = box.w * z / k.fx;
  out.height = box.h * z / k.fy;
  out.length = params.pedestrian_depth_m;
  return out;
}

DepthImage MaskDepth(const DepthImage& depth, std::span<const Box2D> boxes) {
  DepthImage out = depth;
  for (const Box2D& box : boxes) {
    const PixelRect r = CoveredPixels(box, depth.width, depth.height);
    for (int v = r.v0; v <= r.v1; ++v) {
      for (int u = r.u0; u <= r.u1; ++u) out.at(u, v) = kInvalidDepth;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

bool IsPsd(const Matrix6d& m) {
  if (!m.allFinite()) return false;
  if (!m.isApprox(m.transpose(), 1e-9)) return false;
  const Eigen::SelfAdjointEigenSolver<Matrix6d> solver(m, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, solver.eigenvalues().cwiseAbs().maxCoeff());
  return solver.eigenvalues().minCoeff() >= -1e-9 * scale;
}

TrackState NewTrack(int id, const Eigen::Vector3d& position, double t,
                    const KalmanParams& params) {
  TrackState track;
  track.id = id;
  track.position = position;
  track.velocity.setZero();
  track.covariance.setZero();
  track.covariance.topLeftCorner<3, 3>() =
      Eigen::Matrix3d::Identity() * params.initial_position_var;
  track.covariance.bottomRightCorner<3, 3>() =
      Eigen::Matrix3d::Identity() * params.initial_velocity_var;
  track.last_update = t;
  return track;
}

Matrix6d ProcessNoise(double dt, double accel_noise) {
  const Eigen::Matrix3d i3 = Eigen::Matrix3d::Identity();
  Matrix6d q;
  q.topLeftCorner<3, 3>() = i3 * (dt * dt * dt / 3.0);
  q.topRightCorner<3, 3>() = i3 * (dt * dt / 2.0);
  q.bottomLeftCorner<3, 3>() = i3 * (dt * dt / 2.0);
  q.bottomRightCorner<3, 3>() = i3 * dt;
  return accel_noise * q;
}

TrackState KalmanPredict(const TrackState& track, double dt,
                         const KalmanParams& params) {
  if (!(dt >= 0.0)) {
    throw Error(ErrorCode::kInvalidDt, fmt::format("predict dt {} < 0", dt));
  }
  TrackState out = track;
  out.position = track.position + track.velocity * dt;
  Matrix6d f = Matrix6d::Identity();
  f.topRightCorner<3, 3>() = Eigen::Matrix3d::Identity() * dt;
  out.covariance =
      Symmetrize(f * track.covariance * f.transpose() + ProcessNoise(dt, params.accel_noise));
  RequirePsd(out.covariance, "predict");
  return out;
}

TrackState KalmanUpdate(const TrackState& track, const Eigen::Vector3d& obs,
                        const Eigen::Matrix3d& r_obs) {
  Eigen::Matrix<double, 3, 6> h = Eigen::Matrix<double, 3, 6>::Zero();
  h.leftCols<3>().setIdentity();
  const Matrix6d& p = track.covariance;
  const Eigen::Matrix3d s = h * p * h.transpose() + r_obs;
  const Eigen::Matrix<double, 6, 3> gain = p * h.transpose() * s.inverse();

  Eigen::Matrix<double, 6, 1> state;
  state << track.position, track.velocity;
  state += gain * (obs - track.position);

  // Joseph form keeps the update symmetric and PSD under rounding.
  const Matrix6d i_kh = Matrix6d::Identity() - gain * h;
  TrackState out = track;
  out.position = state.head<3>();
  out.velocity = state.tail<3>();
  out.covariance =
      Symmetrize(i_kh * p * i_kh.transpose() + gain * r_obs * gain.transpose());
  RequirePsd(out.covariance, "update");
  return out;
}

void PedestrianTracker::Observe(int id, double t, const Eigen::Vector3d& position,
                                const Eigen::Matrix3d& r_obs) {
  auto it = tracks_.find(id);
  if (it == tracks_.end()) {
    tracks_.emplace(id, NewTrack(id, position, t, params_));
    return;
  }
  TrackState& track = it->second;
  const double dt = std::max(0.0, t - track.last_update);
  track = KalmanUpdate(KalmanPredict(track, dt, params_), position, r_obs);
  track.last_update = std::max(track.last_update, t);
}

void PedestrianTracker::Prune(double t) {
  std::erase_if(tracks_, [&](const auto& entry) {
    return t - entry.second.last_update > max_age_s_;
  });
}

std::vector<TrackState> PedestrianTracker::Snapshot(double t) const {
  std::vector<TrackState> out;
  out.reserve(tracks_.size());
  for (const auto& [id, track] : tracks_) {
    out.push_back(KalmanPredict(track, std::max(0.0, t - track.last_update), params_));
  }
  return out;
}

Detection ParseDetection(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream in(line);
  std::string field;
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (fields.size() != 8) {
    throw Error(ErrorCode::kBadInput,
                fmt::format("detection needs 8 fields t,u,v,w,h,class,conf,"
                            "track_id; got {}",
                            fields.size()));
  }
  static constexpr const char* kNames[] = {"t", "u", "v", "w", "h", "class", "conf", "track_id"};
  double values[8];
  for (int i = 0; i < 8; ++i) {
    try {
      std::size_t used = 0;
      values[i] = std::stod(fields[i], &used);
      if (used != fields[i].size() || !std::isfinite(values[i])) {
        throw std::invalid_argument("bad");
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kBadInput,
                  fmt::format("detection field `{}` is not a number: `{}`",
                              kNames[i], fields[i]));
    }
  }
  if (values[3] <= 0.0 || values[4] <= 0.0) {
    throw Error(ErrorCode::kBadInput, "detection box needs positive w and h");
  }
  if (values[6] < 0.0 || values[6] > 1.0) {
    throw Error(ErrorCode::kBadInput, "detection confidence outside [0, 1]");
  }
  Detection det;
  det.t = values[0];
  det.box = Box2D{values[1], values[2], values[3], values[4],
                  static_cast<int>(values[5]), values[6]};
  det.track_id = static_cast<int>(values[7]);
  return det;
}

std::string FormatDetection(const Detection& det) {
  return fmt::format("{:.6f},{:.3f},{:.3f},{:.3f},{:.3f},{},{:.3f},{}", det.t,
                     det.box.u_center, det.box.v_center, det.box.w, det.box.h,
                     det.box.class_id, det.box.confidence, det.track_id);
}

}  // namespace podcar::perception
