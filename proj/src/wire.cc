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

#include "podcar/wire.h"

#include <cstdlib>
#include <string>

#include "podcar/error.h"

namespace podcar::wire {
namespace {

void PutU16(std::vector<std::uint8_t>& out, std::uint16_t value) {
  out.push_back(static_cast<std::uint8_t>(value >> 8));
  out.push_back(static_cast<std::uint8_t>(value & 0xFF));
}

std::uint16_t GetU16(std::span<const std::uint8_t> bytes, std::size_t at) {
  return static_cast<std::uint16_t>((bytes[at] << 8) | bytes[at + 1]);
}

bool KnownType(std::uint8_t raw) {
  switch (static_cast<MsgType>(raw)) {
    case MsgType::kHeartbeat:
    case MsgType::kDriveCmd:
    case MsgType::kSteerCmd:
    case MsgType::kRelayCmd:
    case MsgType::kEStop:
    case MsgType::kTelemetry:
      return true;
  }
  return false;
}

bool DriveInRange(std::int16_t units, const WireLimits& limits) {
  return std::abs(static_cast<int>(units)) <= limits.max_driver_units;
}

void Validate(const WireMessage& msg, const WireLimits& limits) {
  if (const auto* drive = std::get_if<DriveCmd>(&msg)) {
    if (!DriveInRange(drive->units, limits)) {
      throw Error(ErrorCode::kInvalidMessage,
                  "drive units " + std::to_string(drive->units) +
                      " exceed +/-" + std::to_string(limits.max_driver_units));
    }
  } else if (const auto* relay = std::get_if<RelayCmd>(&msg)) {
    if (relay->channel >= 8) {
      throw Error(ErrorCode::kInvalidMessage,
                  "relay channel " + std::to_string(relay->channel) +
                      " out of range 0..7");
    }
  } else if (const auto* tel = std::get_if<Telemetry>(&msg)) {
    if ((tel->flags & kReservedFlagMask) != 0) {
      throw Error(ErrorCode::kInvalidMessage, "reserved telemetry flag set");
    }
  }
}

struct PayloadWriter {
  std::vector<std::uint8_t>& out;

  void operator()(const Heartbeat&) const {}
  void operator()(const EStop&) const {}
  void operator()(const DriveCmd& m) const {
    PutU16(out, static_cast<std::uint16_t>(m.units));
  }
  void operator()(const SteerCmd& m) const { PutU16(out, m.target_mv); }
  void operator()(const RelayCmd& m) const {
    out.push_back(m.channel);
    out.push_back(m.closed ? 1 : 0);
  }
  void operator()(const Telemetry& m) const {
    PutU16(out, m.steer_mv);
    PutU16(out, static_cast<std::uint16_t>(m.motor_units_echo));
    out.push_back(m.flags);
    PutU16(out, m.battery_cv);
  }
};

}  // namespace

std::string_view DecodeErrorName(DecodeError error) {
  switch (error) {
    case DecodeError::kBadMagic: return "BadMagic";
    case DecodeError::kBadVersion: return "BadVersion";
    case DecodeError::kBadLength: return "BadLength";
    case DecodeError::kBadChecksum: return "BadChecksum";
    case DecodeError::kUnknownType: return "UnknownType";
    case DecodeError::kBadFieldRange: return "BadFieldRange";
  }
  return "Unknown";
}

std::string_view MsgTypeName(MsgType type) {
  switch (type) {
    case MsgType::kHeartbeat: return "Heartbeat";
    case MsgType::kDriveCmd: return "DriveCmd";
    case MsgType::kSteerCmd: return "SteerCmd";
    case MsgType::kRelayCmd: return "RelayCmd";
    case MsgType::kEStop: return "EStop";
    case MsgType::kTelemetry: return "Telemetry";
  }
  return "Unknown";
}

MsgType TypeOf(const WireMessage& msg) {
  static constexpr MsgType kByIndex[] = {
      MsgType::kHeartbeat, MsgType::kDriveCmd, MsgType::kSteerCmd,
      MsgType::kRelayCmd,  MsgType::kEStop,    MsgType::kTelemetry};
  return kByIndex[msg.index()];
}

std::size_t PayloadSize(MsgType type) {
  switch (type) {
    case MsgType::kHeartbeat: return 0;
    case MsgType::kDriveCmd: return 2;
    case MsgType::kSteerCmd: return 2;
    case MsgType::kRelayCmd: return 2;
    case MsgType::kEStop: return 0;
    case MsgType::kTelemetry: return 7;
  }
  return 0;
}

std::uint16_t Checksum(std::span<const std::uint8_t> bytes) {
  std::uint32_t sum = 0;
  for (std::uint8_t b : bytes) sum += b;
  return static_cast<std::uint16_t>(sum & 0xFFFF);
}

std::vector<std::uint8_t> EncodePacket(const WireMessage& msg,
                                       std::uint16_t seq,
                                       const WireLimits& limits) {
  Validate(msg, limits);
  const MsgType type = TypeOf(msg);
  const auto payload_len = static_cast<std::uint16_t>(PayloadSize(type));

  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + payload_len + kChecksumSize);
  out.push_back(kMagic0);
  out.push_back(kMagic1);
  out.push_back(kVersion);
  out.push_back(static_cast<std::uint8_t>(type));
  PutU16(out, seq);
  PutU16(out, payload_len);
  std::visit(PayloadWriter{out}, msg);
  PutU16(out, Checksum(out));
  return out;
}

std::variant<Packet, DecodeError> DecodePacket(
    std::span<const std::uint8_t> bytes, const WireLimits& limits) {
  if (bytes.size() < kHeaderSize + kChecksumSize) return DecodeError::kBadLength;
  if (bytes[0] != kMagic0 || bytes[1] != kMagic1) return DecodeError::kBadMagic;
  if (bytes[2] != kVersion) return DecodeError::kBadVersion;
  if (!KnownType(bytes[3])) return DecodeError::kUnknownType;

  const auto type = static_cast<MsgType>(bytes[3]);
  const std::uint16_t seq = GetU16(bytes, 4);
  const std::uint16_t payload_len = GetU16(bytes, 6);
  if (payload_len != PayloadSize(type)) return DecodeError::kBadLength;
  if (bytes.size() != kHeaderSize + payload_len + kChecksumSize) {
    return DecodeError::kBadLength;
  }

  const std::size_t body_len = kHeaderSize + payload_len;
  if (Checksum(bytes.first(body_len)) != GetU16(bytes, body_len)) {
    return DecodeError::kBadChecksum;
  }

  const std::size_t p = kHeaderSize;
  Packet packet;
  packet.seq = seq;
  switch (type) {
    case MsgType::kHeartbeat:
      packet.msg = Heartbeat{};
      break;
    case MsgType::kEStop:
      packet.msg = EStop{};
      break;
    case MsgType::kDriveCmd: {
      const auto units = static_cast<std::int16_t>(GetU16(bytes, p));
      if (!DriveInRange(units, limits)) return DecodeError::kBadFieldRange;
      packet.msg = DriveCmd{units};
      break;
    }
    case MsgType::kSteerCmd:
      packet.msg = SteerCmd{GetU16(bytes, p)};
      break;
    case MsgType::kRelayCmd: {
      const std::uint8_t channel = bytes[p];
      const std::uint8_t closed = bytes[p + 1];
      if (channel >= 8 || closed > 1) return DecodeError::kBadFieldRange;
      packet.msg = RelayCmd{channel, closed == 1};
      break;
    }
    case MsgType::kTelemetry: {
      Telemetry tel;
      tel.steer_mv = GetU16(bytes, p);
      tel.motor_units_echo = static_cast<std::int16_t>(GetU16(bytes, p + 2));
      tel.flags = bytes[p + 4];
      tel.battery_cv = GetU16(bytes, p + 5);
      if ((tel.flags & kReservedFlagMask) != 0) return DecodeError::kBadFieldRange;
      packet.msg = tel;
      break;
    }
  }
  return packet;
}

LivenessTracker::LivenessTracker(double timeout_s, double start_time_s)
    : timeout_(timeout_s),
      last_rx_time_(start_time_s),
      last_tx_time_(start_time_s) {}

void LivenessTracker::Update(double now_s, bool rx) {
  if (now_s < last_rx_time_) {
    throw Error(ErrorCode::kClockWentBackwards,
                "now " + std::to_string(now_s) + " < last rx " +
                    std::to_string(last_rx_time_));
  }
  if (rx) last_rx_time_ = now_s;
}

}  // namespace podcar::wire
