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

// RGB-D pipeline: ordered point cloud to planar laser scan with floor
// filtering, 2D detection to 3D box back-projection, constant-velocity
// Kalman smoothing of pedestrian tracks and depth masking of pedestrians.
//
// Frames:
//   camera  optical convention, x right, y down, z forward (depth).
//   level   origin on the ground under the camera, x forward, y left, z up.

#ifndef PODCAR_PERCEPTION_H_
#define PODCAR_PERCEPTION_H_

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace podcar::perception {

// Depth value for "no return".
inline constexpr float kInvalidDepth = 0.0f;

struct CameraIntrinsics {
  double fx = 330.0;
  double fy = 330.0;
  double cx = 159.5;
  double cy = 119.5;
  int width = 320;
  int height = 240;
  double range_min = 0.3;
  double range_max = 5.0;
  double pitch_offset = 0.0;  // rad, positive tilts the camera down

  void Validate() const;
};

// Where the camera sits on the vehicle, relative to the rear-axle origin.
struct CameraMount {
  double forward_m = 1.2;
  double height_m = 0.9;
};

struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<float> depth;  // metres along the optical axis, row-major

  DepthImage() = default;
  DepthImage(int w, int h) : width(w), height(h), depth(std::size_t(w) * h, kInvalidDepth) {}

  float at(int u, int v) const { return depth[std::size_t(v) * width + u]; }
  float& at(int u, int v) { return depth[std::size_t(v) * width + u]; }
  bool operator==(const DepthImage&) const = default;
};

inline bool ValidDepth(float d) { return d > 0.0f && d == d && d < 1e30f; }

struct CloudPoint {
  float x = 0.0f;
  float y = 0.0f;
  float z = 0.0f;
  std::uint32_t rgba = 0;
};
static_assert(sizeof(CloudPoint) == 16);

// Ordered cloud stored as 20-byte chunks per pixel: x, y, z as little-endian
// float32, a packed 32-bit colour, then 4 bytes of padding. Missing points
// carry NaN coordinates.
class PointCloud {
 public:
  static constexpr std::size_t kPointStep = 20;

  PointCloud() = default;
  PointCloud(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return std::size_t(width_) * height_; }

  // Hot in the scan projection, hence inline with a little-endian fast path.
  CloudPoint Get(std::size_t index) const {
    const std::uint8_t* p = data_.data() + index * kPointStep;
    if constexpr (std::endian::native == std::endian::little) {
      CloudPoint c;
      std::memcpy(&c, p, sizeof(c));
      return c;
    }
    return GetPortable(p);
  }
  void Set(std::size_t index, const CloudPoint& point) {
    std::uint8_t* p = data_.data() + index * kPointStep;
    if constexpr (std::endian::native == std::endian::little) {
      std::memcpy(p, &point, sizeof(point));
      std::memset(p + sizeof(point), 0, kPointStep - sizeof(point));
      return;
    }
    SetPortable(p, point);
  }

  std::span<const std::uint8_t> bytes() const { return data_; }
  static PointCloud FromBytes(int width, int height,
                              std::span<const std::uint8_t> bytes);

 private:
  static CloudPoint GetPortable(const std::uint8_t* p);
  static void SetPortable(std::uint8_t* p, const CloudPoint& point);

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

struct LaserScan {
  double angle_min = -0.45;
  double angle_max = 0.45;
  double angle_increment = 0.005;
  double range_min = 0.3;
  double range_max = 5.0;
  std::vector<float> ranges;  // +inf for no return

  static std::size_t BinCount(double angle_min, double angle_max,
                              double angle_increment);
};

struct ScanParams {
  double floor_z_max = 0.05;
  double angle_min = -0.45;
  double angle_max = 0.45;
  double angle_increment = 0.005;
  double range_min = 0.3;
  double range_max = 5.0;
};

struct Box2D {
  double u_center = 0.0;
  double v_center = 0.0;
  double w = 0.0;
  double h = 0.0;
  int class_id = 0;
  double confidence = 1.0;

  bool InImage(int width, int height) const;
};

struct Box3D {
  double x = 0.0;  // camera frame, metres
  double y = 0.0;
  double z = 0.0;
  double length = 0.0;
  double width = 0.0;
  double height = 0.0;
};

struct ProjectionParams {
  double pedestrian_depth_m = 0.4;
};

// Inclusive pixel range covered by a box, clipped to the image. Pixel
// centres sit on integer coordinates.
struct PixelRect {
  int u0 = 0, v0 = 0, u1 = -1, v1 = -1;
  bool empty() const { return u1 < u0 || v1 < v0; }
  long long area() const { return empty() ? 0 : (long long)(u1 - u0 + 1) * (v1 - v0 + 1); }
};
PixelRect CoveredPixels(const Box2D& box, int width, int height);

// Camera-frame cloud from a depth image.
PointCloud DepthToCloud(const DepthImage& depth, const CameraIntrinsics& k);

// Camera-frame point to the level frame, applying the mount height and the
// pitch offset.
Eigen::Vector3d CameraToLevel(const Eigen::Vector3d& p, const CameraIntrinsics& k,
                              const CameraMount& mount);
Eigen::Vector3d CameraDirToLevel(const Eigen::Vector3d& d, const CameraIntrinsics& k);
// Columns are the camera's right, down and forward axes in the level frame.
Eigen::Matrix3d CameraToLevelRotation(const CameraIntrinsics& k);
PointCloud CameraCloudToLevel(const PointCloud& cloud, const CameraIntrinsics& k,
                              const CameraMount& mount);

LaserScan CloudToScan(const PointCloud& cloud, const ScanParams& params);

// Throws Error(kBadInput) for boxes outside the image and
// Error(kNoValidDepth) when the central half of the box has no depth.
Box3D ProjectTo3d(const Box2D& box, const DepthImage& depth,
                  const CameraIntrinsics& k, const ProjectionParams& params = {});

DepthImage MaskDepth(const DepthImage& depth, std::span<const Box2D> boxes);

// ---------------------------------------------------------------------------
// Constant-velocity Kalman tracking.

using Matrix6d = Eigen::Matrix<double, 6, 6>;

struct TrackState {
  int id = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  Matrix6d covariance = Matrix6d::Identity();
  double last_update = 0.0;
};

struct KalmanParams {
  double accel_noise = 0.5;  // white acceleration spectral density, m^2/s^3
  double initial_position_var = 0.25;
  double initial_velocity_var = 4.0;
};

TrackState NewTrack(int id, const Eigen::Vector3d& position, double t,
                    const KalmanParams& params = {});

Matrix6d ProcessNoise(double dt, double accel_noise);

// Throws Error(kInvalidDt) for negative dt and Error(kNonPsdCovariance) if
// the covariance loses positive semidefiniteness.
TrackState KalmanPredict(const TrackState& track, double dt,
                         const KalmanParams& params = {});
TrackState KalmanUpdate(const TrackState& track, const Eigen::Vector3d& obs,
                        const Eigen::Matrix3d& r_obs);

bool IsPsd(const Matrix6d& m);

// Keeps one filter per detector track id, in whatever frame observations
// arrive in.
class PedestrianTracker {
 public:
  explicit PedestrianTracker(KalmanParams params = {}, double max_age_s = 1.0)
      : params_(params), max_age_s_(max_age_s) {}

  void Observe(int id, double t, const Eigen::Vector3d& position,
               const Eigen::Matrix3d& r_obs);
  // Drops tracks not updated within max_age of `t`.
  void Prune(double t);
  // Tracks predicted forward to `t` (copies).
  std::vector<TrackState> Snapshot(double t) const;
  std::size_t size() const { return tracks_.size(); }

 private:
  KalmanParams params_;
  double max_age_s_;
  std::map<int, TrackState> tracks_;
};

// Line-delimited detector output: `t,u,v,w,h,class,conf,track_id`.
struct Detection {
  double t = 0.0;
  Box2D box;
  int track_id = -1;
};

// Throws Error(kBadInput) with a description of the broken field.
Detection ParseDetection(const std::string& line);
std::string FormatDetection(const Detection& det);

}  // namespace podcar::perception

#endif  // PODCAR_PERCEPTION_H_
