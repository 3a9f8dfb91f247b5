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

#include "podcar/ui_protocol.h"

#include <cmath>

#include <gtest/gtest.h>
#include <json.hpp>

#include "test_util.h"

namespace podcar::gateway {
namespace {

using nlohmann::json;
using ::podcar::testing::ThrownCode;

TEST(ParseUiCommand, Examples) {
  const UiCommand joy = ParseUiCommand(
      R"({"type":"joy","axes":[0,0,0,0.5,2.0],"buttons":[0,0,0,0,0,1]})");
  const auto& j = std::get<UiJoy>(joy);
  EXPECT_EQ(j.axes[3], 0.5);
  EXPECT_EQ(j.axes[4], 1.0);  // clamped
  EXPECT_TRUE(j.buttons[5]);
  EXPECT_FALSE(j.buttons[0]);

  EXPECT_TRUE(std::get<UiEnable>(ParseUiCommand(R"({"type":"enable","held":true})")).held);
  EXPECT_TRUE(std::holds_alternative<UiEStop>(ParseUiCommand(R"({"type":"estop"})")));
  EXPECT_TRUE(std::holds_alternative<UiReset>(ParseUiCommand(R"({"type":"reset"})")));
  const UiGoal g = std::get<UiGoal>(ParseUiCommand(R"({"type":"goal","x":3,"y":-1.5})"));
  EXPECT_EQ(g.goal.x, 3);
  EXPECT_EQ(g.goal.y, -1.5);
  EXPECT_EQ(g.goal.heading, 0);
  EXPECT_TRUE(std::holds_alternative<UiClearGoal>(ParseUiCommand(R"({"type":"clear_goal"})")));
  EXPECT_EQ(std::get<UiMode>(ParseUiCommand(R"({"type":"mode","mode":"autonomous"})")).mode,
            safety::DriveMode::kAutonomous);
  EXPECT_EQ(std::get<UiMode>(ParseUiCommand(R"({"type":"mode","mode":"MANUAL"})")).mode,
            safety::DriveMode::kManual);
}

TEST(ParseUiCommand, RejectsMalformed) {
  for (const char* text :
       {"", "nope", "[]", "{}", R"({"type":5})", R"({"type":"fly"})",
        R"({"type":"joy","axes":[0]})", R"({"type":"joy","axes":["a"],"buttons":[]})",
        R"({"type":"joy","axes":[0],"buttons":["x"]})", R"({"type":"enable"})",
        R"({"type":"enable","held":"yes"})", R"({"type":"goal","x":1})",
        R"({"type":"goal","x":"1","y":2})", R"({"type":"mode","mode":"turbo"})",
        R"({"type":"mode"})"}) {
    EXPECT_EQ(ThrownCode([&] { ParseUiCommand(text); }), ErrorCode::kBadInput) << text;
  }
}

TEST(UiCommandToJson, RoundTrips) {
  const UiCommand cmds[] = {UiJoy{{0.1, -1.0, 0.0}, {true, false}},
                            UiEnable{true},
                            UiEStop{},
                            UiReset{},
                            UiGoal{{4.5, -2.0, 0.3}},
                            UiClearGoal{},
                            UiMode{safety::DriveMode::kAutonomous}};
  for (const UiCommand& c : cmds) {
    EXPECT_EQ(ParseUiCommand(UiCommandToJson(c)), c) << UiCommandToJson(c);
  }
}

TEST(TelemetryToJson, Shape) {
  TelemetryFrame f;
  f.t = 1.5;
  f.motor_units = 400;
  f.safety_state = safety::SafetyState::kActive;
  perception::LaserScan scan;
  scan.ranges = {1.5f, std::numeric_limits<float>::infinity(), 2.0f};
  perception::TrackState tr;
  tr.id = 4;
  tr.position = Eigen::Vector3d(3, -1, 0);
  tr.velocity = Eigen::Vector3d(0.5, 0, 0);
  const json j = json::parse(TelemetryToJson(f, &scan, {tr}));
  EXPECT_EQ(j["type"], "telemetry");
  EXPECT_EQ(j["frame"]["t"], 1.5);
  EXPECT_EQ(j["frame"]["motor_units"], 400);
  EXPECT_EQ(j["frame"]["safety_state"], "ACTIVE");
  EXPECT_EQ(j["frame"]["mode"], "MANUAL");
  ASSERT_EQ(j["scan"]["ranges"].size(), 3u);
  EXPECT_TRUE(j["scan"]["ranges"][1].is_null());
  EXPECT_EQ(j["scan"]["ranges"][2], 2.0);
  ASSERT_EQ(j["tracks"].size(), 1u);
  EXPECT_EQ(j["tracks"][0]["id"], 4);
  EXPECT_EQ(j["tracks"][0]["vx"], 0.5);

  const json bare = json::parse(TelemetryToJson(f, nullptr, {}));
  EXPECT_FALSE(bare.contains("scan"));
  EXPECT_TRUE(bare["tracks"].empty());
}

TEST(ApplyUiCommand, DrivesTheControlLoop) {
  plant::PlantConfig pc;
  board::LoopbackLink link;
  board::SimBoard board(pc, board::BoardConfig{});
  ControlLoop loop(ControlConfig{}, pc.Linkage(), link);
  double t = 0;
  auto tick = [&] {
    const TickReport r = loop.Tick(t, std::nullopt, {});
    while (auto d = link.BoardPoll()) board.Receive(*d, t);
    link.BoardSend(board.Step(t, 0.02));
    t += 0.02;
    return r;
  };
  const UiCommand joy = ParseUiCommand(R"({"type":"joy","axes":[0,0,0,0,1],"buttons":[0,0,0,0,0,0]})");
  const UiCommand enable = ParseUiCommand(R"({"type":"enable","held":true})");
  TickReport r;
  for (int i = 0; i < 10; ++i) {
    ApplyUiCommand(loop, joy, t);
    ApplyUiCommand(loop, enable, t);
    r = tick();
  }
  EXPECT_TRUE(r.decision.motor_power);
  EXPECT_EQ(r.frame.motor_units, 400);

  ApplyUiCommand(loop, ParseUiCommand(R"({"type":"estop"})"), t);
  r = tick();
  EXPECT_EQ(r.decision.state, safety::SafetyState::kFaultLatched);
  ApplyUiCommand(loop, ParseUiCommand(R"({"type":"reset"})"), t);
  ApplyUiCommand(loop, enable, t);
  ApplyUiCommand(loop, joy, t);
  r = tick();
  EXPECT_TRUE(r.decision.motor_power);

  ApplyUiCommand(loop, ParseUiCommand(R"({"type":"mode","mode":"autonomous"})"), t);
  EXPECT_EQ(loop.mode(), safety::DriveMode::kAutonomous);

  // Too few axes for the configured stick.
  const UiCommand short_joy = ParseUiCommand(R"({"type":"joy","axes":[0],"buttons":[]})");
  EXPECT_EQ(ThrownCode([&] { ApplyUiCommand(loop, short_joy, t); }), ErrorCode::kBadAxisIndex);
}

}  // namespace
}  // namespace podcar::gateway
