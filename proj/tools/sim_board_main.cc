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

// Stand-in for the R4 board: listens for commands over UDP, runs the
// simulated vehicle and answers with telemetry. Lets `gateway --mode
// hardware` be exercised without the vehicle.

#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "podcar/board.h"
#include "podcar/config.h"
#include "podcar/error.h"
#include "podcar/net.h"

namespace {

std::atomic<bool> g_stop{false};
void OnSignal(int) { g_stop = true; }

}  // namespace

int main(int argc, char** argv) {
  using namespace podcar;
  CLI::App app{"Simulated R4 board over UDP"};
  std::string config;
  int udp_cmd = -1;
  int udp_tel = -1;
  std::string gateway_host = "127.0.0.1";
  double rate_hz = 50.0;
  double duration = 0.0;
  bool dmh_open = false;
  app.add_option("--config", config, "gateway configuration file")->check(CLI::ExistingFile);
  app.add_option("--udp-cmd", udp_cmd, "port to receive commands on");
  app.add_option("--udp-tel", udp_tel, "gateway telemetry port");
  app.add_option("--gateway-host", gateway_host, "gateway address");
  app.add_option("--rate", rate_hz, "telemetry rate, Hz")->check(CLI::PositiveNumber);
  app.add_option("--duration", duration, "stop after this many seconds");
  app.add_flag("--dmh-open", dmh_open, "start with the dead man's handle released");
  CLI11_PARSE(app, argc, argv);

  std::signal(SIGINT, OnSignal);
  std::signal(SIGTERM, OnSignal);
  try {
    gateway::GatewayConfig cfg;
    if (!config.empty()) cfg = gateway::LoadGatewayConfig(config);
    if (udp_cmd >= 0) cfg.udp_cmd_port = udp_cmd;
    if (udp_tel >= 0) cfg.udp_tel_port = udp_tel;

    net::UdpLink link(static_cast<std::uint16_t>(cfg.udp_cmd_port), gateway_host,
                      static_cast<std::uint16_t>(cfg.udp_tel_port));
    plant::PlantState initial = plant::InitialState(cfg.plant);
    initial.dmh_closed = !dmh_open;
    board::SimBoard board(cfg.plant, cfg.board, initial, 0.0);
    std::cerr << fmt::format("board listening on {}, telemetry to {}:{}\n", link.local_port(),
                             gateway_host, cfg.udp_tel_port);

    const auto start = std::chrono::steady_clock::now();
    const double dt = 1.0 / rate_hz;
    for (std::int64_t k = 0; !g_stop; ++k) {
      const double now = k * dt;
      if (duration > 0.0 && now >= duration) break;
      while (auto datagram = link.Poll()) board.Receive(*datagram, now);
      link.Send(board.Step(now, dt));
      std::this_thread::sleep_until(
          start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>((k + 1) * dt)));
    }
    const auto& c = board.counters();
    std::cout << fmt::format("rx_ok = {}\nrx_rejected = {}\nestops = {}\n", c.rx_ok,
                             c.rx_rejected, c.estops);
    return 0;
  } catch (const Error& e) {
    std::cerr << "sim_board: " << e.what() << '\n';
    return 1;
  }
}
