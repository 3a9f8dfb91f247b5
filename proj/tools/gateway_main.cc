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

// The gateway service. In sim mode it drives the in-process vehicle through
// a scenario; in hardware mode it talks UDP to the board.

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "podcar/config.h"
#include "podcar/error.h"
#include "podcar/net.h"
#include "podcar/scenario.h"
#include "podcar/ui_protocol.h"

namespace {

using namespace podcar;
using Clock = std::chrono::steady_clock;

std::atomic<bool> g_stop{false};

void OnSignal(int) { g_stop = true; }

struct Options {
  std::string mode = "sim";
  std::string config;
  std::string scenario;
  std::string log;
  std::string summary;
  std::string calibration;
  int ui_port = -1;
  int udp_cmd = -1;
  int udp_tel = -1;
  std::string board_host;
  bool realtime = false;
  bool fast = false;
  double duration = 0.0;
};

// Sleeps until the wall clock reaches tick `k`.
class Pacer {
 public:
  explicit Pacer(double hz) : period_(std::chrono::duration<double>(1.0 / hz)) {}
  void Wait(std::int64_t k) {
    std::this_thread::sleep_until(start_ + std::chrono::duration_cast<Clock::duration>(period_ * k));
  }
  double Elapsed() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }

 private:
  Clock::time_point start_ = Clock::now();
  std::chrono::duration<double> period_;
};

int RunSim(const gateway::GatewayConfig& cfg, const Options& opt) {
  gateway::Scenario scenario;
  if (!opt.scenario.empty()) {
    scenario = gateway::LoadScenario(opt.scenario);
  } else {
    scenario.name = "interactive";
    scenario.duration_s = opt.duration > 0.0 ? opt.duration : 1e9;
  }
  if (opt.duration > 0.0) scenario.duration_s = opt.duration;

  std::unique_ptr<net::UiServer> ui;
  if (cfg.ui_port > 0) {
    ui = std::make_unique<net::UiServer>(static_cast<std::uint16_t>(cfg.ui_port));
    std::cerr << fmt::format("console websocket on port {}\n", ui->port());
  }
  const bool realtime = opt.realtime || (ui && !opt.fast);
  if (!ui && scenario.duration_s >= 1e9) {
    std::cerr << "sim mode without a scenario needs --duration or a UI port\n";
    return 2;
  }

  std::ofstream log_file;
  std::optional<gateway::TelemetryCsvWriter> writer;
  if (!opt.log.empty()) {
    log_file.open(opt.log);
    if (!log_file) throw Error(ErrorCode::kBadInput, "cannot write " + opt.log);
    writer.emplace(log_file);
  }

  gateway::SimRuntime rt(cfg, scenario);
  Pacer pacer(cfg.control.tick_hz);
  const int push_every =
      std::max(1, static_cast<int>(std::lround(cfg.control.tick_hz / cfg.ui_push_hz)));
  while (!rt.Finished() && !g_stop) {
    if (ui) {
      for (const auto& cmd : ui->Drain()) {
        try {
          gateway::ApplyUiCommand(rt.control(), cmd, rt.now());
        } catch (const Error& e) {
          std::cerr << "console: " << e.what() << '\n';
        }
      }
    }
    const gateway::TickReport report = rt.Step();
    if (!report.status.empty()) std::cerr << fmt::format("t={:.2f} {}\n", rt.now(), report.status);
    if (writer) writer->Append(report.frame);
    if (ui && rt.ticks() % push_every == 0) {
      ui->Broadcast(gateway::TelemetryToJson(report.frame, &rt.perception().scan,
                                             rt.perception().tracks));
    }
    if (realtime) pacer.Wait(rt.ticks());
  }

  const gateway::ScenarioSummary summary = rt.Summary();
  if (!opt.summary.empty()) {
    std::ofstream out(opt.summary);
    gateway::WriteSummary(out, scenario, summary);
  }
  gateway::WriteSummary(std::cout, scenario, summary);
  return 0;
}

int RunHardware(const gateway::GatewayConfig& cfg, const Options& opt) {
  if (!cfg.calibration_file) {
    throw Error(ErrorCode::kNoCalibration,
                "hardware mode needs a steering map (--calibration or calibration_file)");
  }
  const calibration::CalibrationMap calib = calibration::LoadMap(*cfg.calibration_file);
  net::UdpLink link(static_cast<std::uint16_t>(cfg.udp_tel_port), cfg.board_host,
                    static_cast<std::uint16_t>(cfg.udp_cmd_port));
  std::unique_ptr<net::UiServer> ui;
  if (cfg.ui_port > 0) ui = std::make_unique<net::UiServer>(static_cast<std::uint16_t>(cfg.ui_port));

  std::ofstream log_file;
  std::optional<gateway::TelemetryCsvWriter> writer;
  if (!opt.log.empty()) {
    log_file.open(opt.log);
    if (!log_file) throw Error(ErrorCode::kBadInput, "cannot write " + opt.log);
    writer.emplace(log_file);
  }

  gateway::ControlLoop loop(cfg.control, calib, link, 0.0);
  Pacer pacer(cfg.control.tick_hz);
  const int push_every =
      std::max(1, static_cast<int>(std::lround(cfg.control.tick_hz / cfg.ui_push_hz)));
  const std::vector<perception::TrackState> no_tracks;
  for (std::int64_t k = 0; !g_stop; ++k) {
    const double now = pacer.Elapsed();
    if (opt.duration > 0.0 && now >= opt.duration) break;
    if (ui) {
      for (const auto& cmd : ui->Drain()) {
        try {
          gateway::ApplyUiCommand(loop, cmd, now);
        } catch (const Error& e) {
          std::cerr << "console: " << e.what() << '\n';
        }
      }
    }
    const gateway::TickReport report = loop.Tick(now, std::nullopt, no_tracks);
    if (!report.status.empty()) std::cerr << fmt::format("t={:.2f} {}\n", now, report.status);
    if (writer) writer->Append(report.frame);
    if (ui && k % push_every == 0) {
      ui->Broadcast(gateway::TelemetryToJson(report.frame, nullptr, no_tracks));
    }
    pacer.Wait(k + 1);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drive-by-wire gateway"};
  Options opt;
  app.add_option("--mode", opt.mode, "sim or hardware")->check(CLI::IsMember({"sim", "hardware"}));
  app.add_option("--config", opt.config, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--scenario", opt.scenario, "scenario file (sim mode)")->check(CLI::ExistingFile);
  app.add_option("--log", opt.log, "telemetry CSV output");
  app.add_option("--summary", opt.summary, "scenario summary output (sim mode)");
  app.add_option("--calibration", opt.calibration, "steering map file");
  app.add_option("--ui-port", opt.ui_port, "console websocket port, 0 disables");
  app.add_option("--udp-cmd", opt.udp_cmd, "board command port");
  app.add_option("--udp-tel", opt.udp_tel, "board telemetry port");
  app.add_option("--board-host", opt.board_host, "board address");
  app.add_option("--duration", opt.duration, "stop after this many seconds");
  auto* rt = app.add_flag("--realtime", opt.realtime, "pace the simulation to the wall clock");
  app.add_flag("--fast", opt.fast, "run the simulation as fast as possible")->excludes(rt);
  CLI11_PARSE(app, argc, argv);

  std::signal(SIGINT, OnSignal);
  std::signal(SIGTERM, OnSignal);
  try {
    gateway::GatewayConfig cfg;
    if (!opt.config.empty()) cfg = gateway::LoadGatewayConfig(opt.config);
    if (!opt.calibration.empty()) cfg.calibration_file = opt.calibration;
    if (opt.ui_port >= 0) cfg.ui_port = opt.ui_port;
    if (opt.udp_cmd >= 0) cfg.udp_cmd_port = opt.udp_cmd;
    if (opt.udp_tel >= 0) cfg.udp_tel_port = opt.udp_tel;
    if (!opt.board_host.empty()) cfg.board_host = opt.board_host;
    if (opt.mode == "sim" && opt.ui_port < 0 && !opt.scenario.empty()) cfg.ui_port = 0;
    cfg.Validate();
    return opt.mode == "sim" ? RunSim(cfg, opt) : RunHardware(cfg, opt);
  } catch (const Error& e) {
    std::cerr << "gateway: " << e.what() << '\n';
    return 1;
  }
}
