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

// Linear map between the virtual steering angle and the steering actuator's
// feedback voltage, fitted from measured (angle, voltage) pairs.

#ifndef PODCAR_CALIBRATION_H_
#define PODCAR_CALIBRATION_H_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace podcar::calibration {

struct CalibSample {
  double delta = 0.0;    // rad
  double voltage = 0.0;  // V
};

struct CalibrationMap {
  double slope = 0.0;      // V/rad
  double intercept = 0.0;  // V at delta == 0
  double rms_residual = 0.0;
  double v_min = 0.0;  // mechanical stops seen in the data
  double v_max = 0.0;
};

// Ordinary least squares of voltage on angle. Throws Error(kInsufficientData)
// for fewer than two samples and Error(kDegenerateFit) when every sample
// shares one angle.
CalibrationMap FitLinear(std::span<const CalibSample> samples);

// Clamped to [v_min, v_max].
double AngleToVoltage(const CalibrationMap& map, double delta);
double VoltageToAngle(const CalibrationMap& map, double voltage);

// CSV with header `delta_rad,voltage_v`. Throws Error(kBadInput) with the
// offending line number.
std::vector<CalibSample> ReadSamplesCsv(std::istream& in);
void WriteSamplesCsv(std::ostream& out, std::span<const CalibSample> samples);

// `key = value` file with slope, intercept, rms_residual, v_min, v_max.
void WriteMap(std::ostream& out, const CalibrationMap& map);
CalibrationMap ReadMap(std::istream& in);
CalibrationMap LoadMap(const std::filesystem::path& path);

}  // namespace podcar::calibration

#endif  // PODCAR_CALIBRATION_H_
