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

#include "podcar/board.h"

#include <cmath>

namespace podcar::board {
namespace {

std::optional<Datagram> PopFront(std::deque<Datagram>& queue) {
  if (queue.empty()) return std::nullopt;
  Datagram front = std::move(queue.front());
  queue.pop_front();
  return front;
}

}  // namespace

void LoopbackLink::Send(std::span<const std::uint8_t> bytes) {
  if (!commands_silenced_) to_board_.emplace_back(bytes.begin(), bytes.end());
}

std::optional<Datagram> LoopbackLink::Poll() { return PopFront(to_gateway_); }

std::optional<Datagram> LoopbackLink::BoardPoll() { return PopFront(to_board_); }

void LoopbackLink::BoardSend(std::span<const std::uint8_t> bytes) {
  if (!telemetry_silenced_) to_gateway_.emplace_back(bytes.begin(), bytes.end());
}

SimBoard::SimBoard(plant::PlantConfig plant_cfg, BoardConfig cfg, double start_time_s)
    : SimBoard(plant_cfg, cfg, plant::InitialState(plant_cfg), start_time_s) {}

SimBoard::SimBoard(plant::PlantConfig plant_cfg, BoardConfig cfg,
                   const plant::PlantState& initial, double start_time_s)
    : plant_cfg_(std::move(plant_cfg)),
      cfg_(cfg),
      plant_(initial),
      liveness_(cfg.heartbeat_timeout_s, start_time_s) {
  plant_.t = start_time_s;
}

void SimBoard::Receive(std::span<const std::uint8_t> bytes, double now_s) {
  const auto decoded = wire::DecodePacket(bytes, cfg_.limits);
  const auto* packet = std::get_if<wire::Packet>(&decoded);
  if (packet == nullptr) {
    ++counters_.rx_rejected;
    return;
  }
  ++counters_.rx_ok;
  liveness_.Update(now_s, true);
  const wire::WireMessage& msg = packet->msg;
  if (const auto* drive = std::get_if<wire::DriveCmd>(&msg)) {
    drive_units_ = drive->units;
  } else if (const auto* steer = std::get_if<wire::SteerCmd>(&msg)) {
    steer_target_v_ = steer->target_mv / 1000.0;
  } else if (const auto* relay = std::get_if<wire::RelayCmd>(&msg)) {
    const auto bit = static_cast<std::uint8_t>(1u << relay->channel);
    relays_ = relay->closed ? (relays_ | bit) : (relays_ & ~bit);
    // Re-arming the power relay clears a board-level e-stop.
    if (relay->closed && relay->channel == cfg_.power_relay_channel) {
      estop_latched_ = false;
    }
  } else if (std::holds_alternative<wire::EStop>(msg)) {
    ++counters_.estops;
    estop_latched_ = true;
    relays_ &= ~static_cast<std::uint8_t>(1u << cfg_.power_relay_channel);
    drive_units_ = 0;
  }
}

Datagram SimBoard::Step(double now_s, double dt_s, double fault_load_a) {
  liveness_.Update(now_s, false);
  const bool stale = liveness_.Stale(now_s);
  if (stale) {
    // Firmware heartbeat check: lose the link, lose the drive.
    drive_units_ = 0;
    relays_ &= ~static_cast<std::uint8_t>(1u << cfg_.power_relay_channel);
  }

  plant::PlantInputs in;
  in.motor_units = estop_latched_ ? 0 : drive_units_;
  in.relay_channels = relays_;
  in.relay_coil_energized =
      !stale && !estop_latched_ && ((relays_ >> cfg_.power_relay_channel) & 1u);
  in.fault_load_a = fault_load_a;

  const int substeps = std::max(1, static_cast<int>(std::ceil(dt_s / cfg_.plant_dt_max_s - 1e-9)));
  const double h = dt_s / substeps;
  for (int i = 0; i < substeps; ++i) {
    in.actuator_duty = 0.0;
    if (steer_target_v_ && !stale) {
      in.actuator_duty =
          steering::ServoUpdate(*steer_target_v_, plant_.feedback_v, cfg_.servo).duty;
    }
    plant_ = plant::Step(plant_, in, h, plant_cfg_);
  }
  plant_.t = now_s + dt_s;

  wire::Telemetry tel = plant::ReadTelemetry(plant_);
  return wire::EncodePacket(tel, seq_.Next());
}

}  // namespace podcar::board
