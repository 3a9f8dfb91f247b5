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

// Steering calibration:
//   calibrate fit --in samples.csv --out steering.map
//   calibrate sweep --out samples.csv [--config f] [--points N --noise V --seed S]
//   calibrate convert --map steering.map (--angle RAD | --voltage V)

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "podcar/calibration.h"
#include "podcar/config.h"
#include "podcar/error.h"
#include "podcar/plant.h"

int main(int argc, char** argv) {
  using namespace podcar;
  CLI::App app{"Steering angle/voltage calibration"};
  app.require_subcommand(1);

  std::string in_path, out_path, config, map_path;
  int points = 41;
  double noise = 0.01;
  std::uint64_t seed = 1;
  std::optional<double> angle, voltage;

  auto* fit = app.add_subcommand("fit", "fit a linear map to measured samples");
  fit->add_option("--in", in_path, "CSV with delta_rad,voltage_v")->required()->check(CLI::ExistingFile);
  fit->add_option("--out", out_path, "map file to write (stdout if omitted)");

  auto* sweep = app.add_subcommand("sweep", "record samples from the simulated linkage");
  sweep->add_option("--out", out_path, "CSV to write (stdout if omitted)");
  sweep->add_option("--config", config, "gateway configuration")->check(CLI::ExistingFile);
  sweep->add_option("--points", points, "number of samples")->check(CLI::Range(2, 100000));
  sweep->add_option("--noise", noise, "voltage noise sigma, V")->check(CLI::NonNegativeNumber);
  sweep->add_option("--seed", seed, "noise seed");

  auto* convert = app.add_subcommand("convert", "apply a map");
  convert->add_option("--map", map_path, "map file")->required()->check(CLI::ExistingFile);
  auto* a = convert->add_option("--angle", angle, "angle, rad");
  convert->add_option("--voltage", voltage, "voltage, V")->excludes(a);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit) {
      std::ifstream in(in_path);
      const auto samples = calibration::ReadSamplesCsv(in);
      const calibration::CalibrationMap map = calibration::FitLinear(samples);
      if (out_path.empty()) {
        calibration::WriteMap(std::cout, map);
      } else {
        std::ofstream out(out_path);
        calibration::WriteMap(out, map);
      }
      std::cerr << fmt::format("{} samples, slope {:.6f} V/rad, intercept {:.6f} V, rms {:.4g} V\n",
                               samples.size(), map.slope, map.intercept, map.rms_residual);
    } else if (*sweep) {
      gateway::GatewayConfig cfg;
      if (!config.empty()) cfg = gateway::LoadGatewayConfig(config);
      const auto samples = plant::SweepSteering(cfg.plant, points, noise, seed);
      if (out_path.empty()) {
        calibration::WriteSamplesCsv(std::cout, samples);
      } else {
        std::ofstream out(out_path);
        calibration::WriteSamplesCsv(out, samples);
      }
    } else if (*convert) {
      const calibration::CalibrationMap map = calibration::LoadMap(map_path);
      if (angle) {
        std::cout << fmt::format("{:.6f}\n", calibration::AngleToVoltage(map, *angle));
      } else if (voltage) {
        std::cout << fmt::format("{:.6f}\n", calibration::VoltageToAngle(map, *voltage));
      } else {
        std::cerr << "convert needs --angle or --voltage\n";
        return 2;
      }
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "calibrate: " << e.what() << '\n';
    return 1;
  }
}
