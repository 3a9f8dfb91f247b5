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

// Network transports: the UDP link to the board and the websocket bridge to
// the operator console. Both hand data to the control loop through queues;
// the loop never blocks on the network.

#ifndef PODCAR_NET_H_
#define PODCAR_NET_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "podcar/board.h"
#include "podcar/ui_protocol.h"

namespace podcar::net {

// Datagram link. Binds `local_port` (0 picks a free one) and sends to the
// peer. Used by the gateway (bind telemetry port, send to command port) and
// by the board emulator (the other way round).
class UdpLink : public board::BoardLink {
 public:
  UdpLink(std::uint16_t local_port, const std::string& peer_host, std::uint16_t peer_port);
  ~UdpLink() override;

  // Send failures are counted, not thrown: the heartbeat covers a dead link.
  void Send(std::span<const std::uint8_t> bytes) override;
  std::optional<board::Datagram> Poll() override;

  std::uint16_t local_port() const;
  std::uint64_t send_errors() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Websocket server for the console. Runs its own I/O thread. Incoming
// messages are parsed and queued; malformed ones are answered with an error
// message and dropped.
class UiServer {
 public:
  explicit UiServer(std::uint16_t port, const std::string& address = "0.0.0.0");
  ~UiServer();
  UiServer(const UiServer&) = delete;
  UiServer& operator=(const UiServer&) = delete;

  std::uint16_t port() const;
  void Broadcast(std::string text);
  std::vector<gateway::UiCommand> Drain();
  std::size_t client_count() const;
  std::uint64_t rejected() const;

  struct Impl;  // opaque; shared with the per-connection sessions

 private:
  std::shared_ptr<Impl> impl_;
};

}  // namespace podcar::net

#endif  // PODCAR_NET_H_
