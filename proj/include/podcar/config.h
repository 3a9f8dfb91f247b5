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

// Gateway configuration. Every tunable has a default; a flat key-value file
// overrides any subset of them. Unknown keys are an error so typos surface.

#ifndef PODCAR_CONFIG_H_
#define PODCAR_CONFIG_H_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "podcar/board.h"
#include "podcar/control.h"
#include "podcar/perception.h"
#include "podcar/plant.h"

namespace podcar::gateway {

struct GatewayConfig {
  ControlConfig control;
  plant::PlantConfig plant;
  board::BoardConfig board;

  perception::CameraIntrinsics camera;
  perception::CameraMount mount;
  perception::ScanParams scan;
  perception::KalmanParams kalman;
  perception::ProjectionParams projection;
  double perception_hz = 10.0;
  double detection_sigma_m = 0.1;  // observation noise fed to the tracker
  double track_max_age_s = 1.0;

  // Steering map; sim mode calibrates on its own plant when unset.
  std::optional<std::string> calibration_file;
  int calibration_sweep_points = 41;
  double calibration_noise_v = 0.01;

  std::string board_host = "127.0.0.1";
  int udp_cmd_port = 40004;
  int udp_tel_port = 40005;
  int ui_port = 8080;
  double ui_push_hz = 10.0;

  void Validate() const;
};

// Throws Error(kBadConfig) with the file and line of the offending entry.
GatewayConfig ParseGatewayConfig(std::istream& in, const std::string& source = "");
GatewayConfig LoadGatewayConfig(const std::filesystem::path& path);

}  // namespace podcar::gateway

#endif  // PODCAR_CONFIG_H_
