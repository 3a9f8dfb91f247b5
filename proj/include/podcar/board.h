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

// Board side of the control link: an emulation of the R4 firmware driving
// the simulated plant, and the byte transports the gateway talks through.

#ifndef PODCAR_BOARD_H_
#define PODCAR_BOARD_H_

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "podcar/plant.h"
#include "podcar/steering_loop.h"
#include "podcar/wire.h"

namespace podcar::board {

using Datagram = std::vector<std::uint8_t>;

// Gateway-side view of the link to the board.
class BoardLink {
 public:
  virtual ~BoardLink() = default;
  virtual void Send(std::span<const std::uint8_t> bytes) = 0;
  // Next received datagram, if any. Never blocks.
  virtual std::optional<Datagram> Poll() = 0;
};

// In-process link for simulation with switchable packet loss per direction.
class LoopbackLink : public BoardLink {
 public:
  void Send(std::span<const std::uint8_t> bytes) override;
  std::optional<Datagram> Poll() override;

  // Board side.
  std::optional<Datagram> BoardPoll();
  void BoardSend(std::span<const std::uint8_t> bytes);

  void SilenceCommands(bool silenced) { commands_silenced_ = silenced; }
  void SilenceTelemetry(bool silenced) { telemetry_silenced_ = silenced; }

 private:
  std::deque<Datagram> to_board_;
  std::deque<Datagram> to_gateway_;
  bool commands_silenced_ = false;
  bool telemetry_silenced_ = false;
};

struct BoardConfig {
  double heartbeat_timeout_s = 0.5;
  int power_relay_channel = 0;
  double plant_dt_max_s = 0.005;
  steering::SteerLoopConfig servo;
  wire::WireLimits limits;
};

struct BoardCounters {
  std::uint64_t rx_ok = 0;
  std::uint64_t rx_rejected = 0;
  std::uint64_t estops = 0;
};

// Emulated R4: applies received setpoints, closes the steering loop on the
// actuator feedback and drops the power relay when the link goes quiet.
class SimBoard {
 public:
  SimBoard(plant::PlantConfig plant_cfg, BoardConfig cfg, double start_time_s = 0.0);
  SimBoard(plant::PlantConfig plant_cfg, BoardConfig cfg,
           const plant::PlantState& initial, double start_time_s = 0.0);

  void Receive(std::span<const std::uint8_t> bytes, double now_s);
  // Advances the plant from now_s by dt_s and returns the telemetry packet.
  Datagram Step(double now_s, double dt_s, double fault_load_a = 0.0);

  const plant::PlantState& plant() const { return plant_; }
  plant::PlantState& mutable_plant() { return plant_; }
  const plant::PlantConfig& plant_config() const { return plant_cfg_; }
  const BoardCounters& counters() const { return counters_; }
  bool link_stale(double now_s) const { return liveness_.Stale(now_s); }
  std::optional<double> steer_target_v() const { return steer_target_v_; }

 private:
  plant::PlantConfig plant_cfg_;
  BoardConfig cfg_;
  plant::PlantState plant_;
  wire::LivenessTracker liveness_;
  wire::SequenceCounter seq_;
  BoardCounters counters_;
  int drive_units_ = 0;
  std::optional<double> steer_target_v_;
  std::uint8_t relays_ = 0;
  bool estop_latched_ = false;
};

}  // namespace podcar::board

#endif  // PODCAR_BOARD_H_
