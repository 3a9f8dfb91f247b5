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

#include "podcar/calibration.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "podcar/error.h"
#include "podcar/keyvalue.h"

namespace podcar::calibration {

CalibrationMap FitLinear(std::span<const CalibSample> samples) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::kInsufficientData,
                fmt::format("need at least 2 samples, got {}", samples.size()));
  }
  const auto n = static_cast<double>(samples.size());
  double mean_d = 0.0;
  double mean_v = 0.0;
  for (const auto& s : samples) {
    mean_d += s.delta;
    mean_v += s.voltage;
  }
  mean_d /= n;
  mean_v /= n;

  // Centred sums keep the normal equations well conditioned.
  double sdd = 0.0;
  double sdv = 0.0;
  for (const auto& s : samples) {
    sdd += (s.delta - mean_d) * (s.delta - mean_d);
    sdv += (s.delta - mean_d) * (s.voltage - mean_v);
  }
  if (sdd == 0.0) {
    throw Error(ErrorCode::kDegenerateFit, "all samples share one angle");
  }

  CalibrationMap map;
  map.slope = sdv / sdd;
  map.intercept = mean_v - map.slope * mean_d;
  if (map.slope == 0.0) {
    throw Error(ErrorCode::kDegenerateFit, "voltage does not vary with angle");
  }

  double sq = 0.0;
  map.v_min = samples.front().voltage;
  map.v_max = samples.front().voltage;
  for (const auto& s : samples) {
    const double r = s.voltage - (map.slope * s.delta + map.intercept);
    sq += r * r;
    map.v_min = std::min(map.v_min, s.voltage);
    map.v_max = std::max(map.v_max, s.voltage);
  }
  map.rms_residual = std::sqrt(sq / n);
  return map;
}

double AngleToVoltage(const CalibrationMap& map, double delta) {
  return std::clamp(map.slope * delta + map.intercept, map.v_min, map.v_max);
}

double VoltageToAngle(const CalibrationMap& map, double voltage) {
  return (voltage - map.intercept) / map.slope;
}

std::vector<CalibSample> ReadSamplesCsv(std::istream& in) {
  std::vector<CalibSample> samples;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (line != "delta_rad,voltage_v") {
        throw Error(ErrorCode::kBadInput,
                    fmt::format("line {}: expected header "
                                "`delta_rad,voltage_v`, got `{}`",
                                line_no, line));
      }
      continue;
    }
    std::istringstream fields(line);
    std::string delta_s, voltage_s, extra;
    if (!std::getline(fields, delta_s, ',') ||
        !std::getline(fields, voltage_s, ',') || std::getline(fields, extra, ',')) {
      throw Error(ErrorCode::kBadInput,
                  fmt::format("line {}: expected 2 columns", line_no));
    }
    try {
      std::size_t used_d = 0, used_v = 0;
      CalibSample s{std::stod(delta_s, &used_d), std::stod(voltage_s, &used_v)};
      if (used_d != delta_s.size() || used_v != voltage_s.size()) {
        throw std::invalid_argument("trailing characters");
      }
      samples.push_back(s);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kBadInput,
                  fmt::format("line {}: not a number pair: `{}`", line_no, line));
    }
  }
  return samples;
}

void WriteSamplesCsv(std::ostream& out, std::span<const CalibSample> samples) {
  out << "delta_rad,voltage_v\n";
  for (const auto& s : samples) out << fmt::format("{:.9g},{:.9g}\n", s.delta, s.voltage);
}

void WriteMap(std::ostream& out, const CalibrationMap& map) {
  out << fmt::format(
      "# steering angle (rad) -> actuator feedback voltage (V)\n"
      "slope = {:.17g}\n"
      "intercept = {:.17g}\n"
      "rms_residual = {:.17g}\n"
      "v_min = {:.17g}\n"
      "v_max = {:.17g}\n",
      map.slope, map.intercept, map.rms_residual, map.v_min, map.v_max);
}

CalibrationMap ReadMap(std::istream& in) {
  const KeyValueFile file = KeyValueFile::Parse(in, "calibration");
  auto need = [&](const char* key) {
    const auto value = file.GetDouble(key);
    if (!value) {
      throw Error(ErrorCode::kNoCalibration, fmt::format("missing `{}`", key));
    }
    return *value;
  };
  CalibrationMap map;
  map.slope = need("slope");
  map.intercept = need("intercept");
  map.rms_residual = need("rms_residual");
  map.v_min = need("v_min");
  map.v_max = need("v_max");
  file.RejectUnused();
  if (map.slope == 0.0 || !(map.v_min < map.v_max)) {
    throw Error(ErrorCode::kNoCalibration,
                "calibration needs slope != 0 and v_min < v_max");
  }
  return map;
}

CalibrationMap LoadMap(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kNoCalibration, "cannot open " + path.string());
  }
  return ReadMap(in);
}

}  // namespace podcar::calibration
