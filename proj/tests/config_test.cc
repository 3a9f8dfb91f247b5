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

#include "podcar/config.h"

#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "podcar/scenario.h"
#include "test_util.h"

namespace podcar::gateway {
namespace {

const std::filesystem::path kRoot(PODCAR_SOURCE_DIR);

GatewayConfig Parse(const std::string& text) {
  std::istringstream in(text);
  return ParseGatewayConfig(in, "test.conf");
}

std::string ParseError(const std::string& text) {
  try {
    Parse(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBadConfig);
    return e.what();
  }
  ADD_FAILURE() << "parsed: " << text;
  return "";
}

std::string CsvOf(const GatewayConfig& cfg, const std::string& scenario) {
  std::ostringstream out;
  RunScenario(cfg, LoadScenario(kRoot / "scenarios" / scenario), &out);
  return out.str();
}

TEST(GatewayConfig, EmptyFileGivesDefaults) {
  const GatewayConfig c = Parse("");
  const GatewayConfig d;
  EXPECT_EQ(c.control.geometry.wheelbase_m, d.control.geometry.wheelbase_m);
  EXPECT_EQ(c.control.teleop.scale_z, d.control.twist.wz_full);
  EXPECT_EQ(c.udp_cmd_port, 40004);
  EXPECT_EQ(c.udp_tel_port, 40005);
  EXPECT_EQ(c.ui_port, 8080);
  EXPECT_FALSE(c.calibration_file);
}

TEST(GatewayConfig, SampleFileMatchesDefaults) {
  const GatewayConfig sample = LoadGatewayConfig(kRoot / "config" / "gateway.conf");
  EXPECT_EQ(CsvOf(sample, "crossing.scn"), CsvOf(GatewayConfig{}, "crossing.scn"));
}

TEST(GatewayConfig, SharedKeysReachEverySubsystem) {
  const GatewayConfig c = Parse(
      "wheelbase_m = 1.5\n"
      "units_to_mps = 0.001\n"
      "max_driver_units = 200\n"
      "heartbeat_timeout_s = 0.3\n"
      "power_relay_channel = 2\n"
      "brake_decel = 2.0\n");
  EXPECT_EQ(c.control.geometry.wheelbase_m, 1.5);
  EXPECT_EQ(c.plant.geometry.wheelbase_m, 1.5);
  EXPECT_EQ(c.plant.units_to_mps, 0.001);
  EXPECT_EQ(c.control.max_driver_units, 200);
  EXPECT_EQ(c.board.limits.max_driver_units, 200);
  EXPECT_EQ(c.board.heartbeat_timeout_s, 0.3);
  EXPECT_EQ(c.control.heartbeat_timeout_s, 0.3);
  EXPECT_EQ(c.board.power_relay_channel, 2);
  EXPECT_EQ(c.control.brake_decel, 2.0);
  EXPECT_EQ(c.plant.brake_decel, 2.0);
}

TEST(GatewayConfig, Overrides) {
  const GatewayConfig c = Parse(
      "# comment\n"
      "teleop_scale_x = 0.1\n"
      "dry_steer_wz_full = 0.8\n"
      "camera_pitch_offset = 0.05\n"
      "linkage_slope = 3.0\n"
      "calibration_file = /tmp/x.map\n"
      "board_host = 10.0.0.7\n");
  EXPECT_EQ(c.control.teleop.scale_x, 0.1);
  EXPECT_EQ(c.control.teleop.scale_z, 0.8);  // follows wz_full unless set
  EXPECT_EQ(c.camera.pitch_offset, 0.05);
  ASSERT_TRUE(c.plant.linkage);
  EXPECT_EQ(c.plant.linkage->slope, 3.0);
  EXPECT_EQ(c.plant.linkage->intercept, 2.5);
  EXPECT_EQ(c.calibration_file, "/tmp/x.map");
  EXPECT_EQ(c.board_host, "10.0.0.7");
}

TEST(GatewayConfig, ErrorsNameTheLine) {
  EXPECT_NE(ParseError("\nbogus = 1\n").find("test.conf:2"), std::string::npos);
  EXPECT_NE(ParseError("bogus = 1\n").find("unknown key"), std::string::npos);
  EXPECT_NE(ParseError("wheelbase_m = abc\n").find("expected a number"), std::string::npos);
  EXPECT_NE(ParseError("wheelbase_m 1.3\n").find("key = value"), std::string::npos);
  EXPECT_NE(ParseError("tick_hz = 50\ntick_hz = 60\n").find("test.conf:2"), std::string::npos);
  EXPECT_NE(ParseError("max_driver_units = 1.5\n").find("max_driver_units"), std::string::npos);
}

TEST(GatewayConfig, ValidationRejectsNonsense) {
  for (const char* text :
       {"tick_hz = 0\n", "udp_cmd_port = 70000\n", "teleop_scale_x = 0.5\n",
        "track_m = 5\n", "steer_min_duty = 2\n", "perception_hz = 0\n",
        "camera_cx = 400\n", "calibration_sweep_points = 1\n", "power_relay_channel = 9\n",
        "motor_tau_s = 0\n"}) {
    ParseError(text);
  }
  EXPECT_EQ(testing::ThrownCode([] { LoadGatewayConfig("/nonexistent.conf"); }),
            ErrorCode::kBadConfig);
}

}  // namespace
}  // namespace podcar::gateway
