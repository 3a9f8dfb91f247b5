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

// Codec for the UDP control link between the high-level stack and the R4
// board. Every packet is
//
//   magic "R4" (0x52 0x34) | version | msg_type | seq (u16) | payload_len (u16)
//   | payload | checksum (u16, byte-sum of everything before it)
//
// with all multi-byte fields big-endian.

#ifndef PODCAR_WIRE_H_
#define PODCAR_WIRE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace podcar::wire {

inline constexpr std::uint8_t kMagic0 = 0x52;
inline constexpr std::uint8_t kMagic1 = 0x34;
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 8;
inline constexpr std::size_t kChecksumSize = 2;
inline constexpr int kDefaultMaxDriverUnits = 400;
inline constexpr std::uint16_t kDefaultCommandPort = 40004;
inline constexpr std::uint16_t kDefaultTelemetryPort = 40005;

enum class MsgType : std::uint8_t {
  kHeartbeat = 0x01,
  kDriveCmd = 0x02,
  kSteerCmd = 0x03,
  kRelayCmd = 0x04,
  kEStop = 0x05,
  kTelemetry = 0x10,
};

// Telemetry flag bits. Bits 4-7 are reserved and must be zero.
inline constexpr std::uint8_t kFlagDmhClosed = 1u << 0;
inline constexpr std::uint8_t kFlagBrakeEngaged = 1u << 1;
inline constexpr std::uint8_t kFlagPowerRelayClosed = 1u << 2;
inline constexpr std::uint8_t kFlagFaultLatched = 1u << 3;
inline constexpr std::uint8_t kReservedFlagMask = 0xF0;

struct Heartbeat {
  bool operator==(const Heartbeat&) const = default;
};

struct DriveCmd {
  std::int16_t units = 0;
  bool operator==(const DriveCmd&) const = default;
};

struct SteerCmd {
  std::uint16_t target_mv = 0;
  bool operator==(const SteerCmd&) const = default;
};

struct RelayCmd {
  std::uint8_t channel = 0;
  bool closed = false;
  bool operator==(const RelayCmd&) const = default;
};

struct EStop {
  bool operator==(const EStop&) const = default;
};

struct Telemetry {
  std::uint16_t steer_mv = 0;
  std::int16_t motor_units_echo = 0;
  std::uint8_t flags = 0;
  std::uint16_t battery_cv = 0;
  bool operator==(const Telemetry&) const = default;
};

using WireMessage =
    std::variant<Heartbeat, DriveCmd, SteerCmd, RelayCmd, EStop, Telemetry>;

struct PacketHeader {
  std::uint8_t version = kVersion;
  MsgType msg_type = MsgType::kHeartbeat;
  std::uint16_t seq = 0;
  std::uint16_t payload_len = 0;
};

struct Packet {
  WireMessage msg;
  std::uint16_t seq = 0;
  bool operator==(const Packet&) const = default;
};

enum class DecodeError {
  kBadMagic,
  kBadVersion,
  kBadLength,
  kBadChecksum,
  kUnknownType,
  kBadFieldRange,
};

std::string_view DecodeErrorName(DecodeError error);

struct WireLimits {
  int max_driver_units = kDefaultMaxDriverUnits;
};

MsgType TypeOf(const WireMessage& msg);
std::size_t PayloadSize(MsgType type);
std::string_view MsgTypeName(MsgType type);

// Byte-sum modulo 2^16.
std::uint16_t Checksum(std::span<const std::uint8_t> bytes);

// Throws Error(kInvalidMessage) when `msg` breaks a variant invariant.
std::vector<std::uint8_t> EncodePacket(const WireMessage& msg,
                                       std::uint16_t seq,
                                       const WireLimits& limits = {});

// Total over arbitrary input.
std::variant<Packet, DecodeError> DecodePacket(
    std::span<const std::uint8_t> bytes, const WireLimits& limits = {});

// Tracks when the peer was last heard from.
class LivenessTracker {
 public:
  explicit LivenessTracker(double timeout_s = 0.5, double start_time_s = 0.0);

  // Throws Error(kClockWentBackwards) if `now_s` precedes the last receive.
  void Update(double now_s, bool rx);
  void MarkTx(double now_s) { last_tx_time_ = now_s; }

  double Age(double now_s) const { return now_s - last_rx_time_; }
  bool Stale(double now_s) const { return Age(now_s) > timeout_; }

  double last_rx_time() const { return last_rx_time_; }
  double last_tx_time() const { return last_tx_time_; }
  double timeout() const { return timeout_; }

 private:
  double timeout_;
  double last_rx_time_;
  double last_tx_time_;
};

// Hands out wrapping sequence numbers.
class SequenceCounter {
 public:
  std::uint16_t Next() { return next_++; }

 private:
  std::uint16_t next_ = 0;
};

}  // namespace podcar::wire

#endif  // PODCAR_WIRE_H_
