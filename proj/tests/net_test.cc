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

#include "podcar/net.h"

#include <chrono>
#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <gtest/gtest.h>
#include <json.hpp>

#include "podcar/control.h"

namespace podcar::net {
namespace {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
using boost::asio::ip::tcp;
using nlohmann::json;

template <typename Pred>
bool WaitFor(Pred pred, double seconds = 2.0) {
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(seconds);
  while (std::chrono::steady_clock::now() < deadline) {
    if (pred()) return true;
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  return pred();
}

struct LinkPair {
  std::unique_ptr<UdpLink> gateway;
  std::unique_ptr<UdpLink> board;
};

// Two links on loopback pointed at each other, on ports the OS picked.
LinkPair MakePair() {
  std::uint16_t gateway_port;
  {
    UdpLink probe(0, "127.0.0.1", 9);
    gateway_port = probe.local_port();
  }
  LinkPair p;
  p.board = std::make_unique<UdpLink>(0, "127.0.0.1", gateway_port);
  p.gateway = std::make_unique<UdpLink>(gateway_port, "127.0.0.1", p.board->local_port());
  return p;
}

TEST(UdpLink, DatagramsCrossBothWays) {
  LinkPair p = MakePair();
  const std::vector<std::uint8_t> hello{1, 2, 3};
  p.gateway->Send(hello);
  std::optional<board::Datagram> got;
  ASSERT_TRUE(WaitFor([&] { return (got = p.board->Poll()).has_value(); }));
  EXPECT_EQ(*got, hello);
  p.board->Send(std::vector<std::uint8_t>{9});
  ASSERT_TRUE(WaitFor([&] { return (got = p.gateway->Poll()).has_value(); }));
  EXPECT_EQ(got->size(), 1u);
  EXPECT_FALSE(p.gateway->Poll());  // never blocks
  EXPECT_EQ(p.gateway->send_errors(), 0u);
}

TEST(UdpLink, ControlLoopDrivesBoardOverUdp) {
  LinkPair p = MakePair();
  plant::PlantConfig pc;
  board::SimBoard sim(pc, board::BoardConfig{});
  gateway::ControlLoop loop(gateway::ControlConfig{}, pc.Linkage(), *p.gateway);
  gateway::JoyInput joy;
  joy.axes.assign(8, 0.0);
  joy.buttons.assign(11, false);
  joy.axes[4] = 1.0;
  joy.buttons[5] = true;

  double t = 0;
  gateway::TickReport r;
  for (int i = 0; i < 150; ++i) {
    loop.SetJoy(joy, t);
    r = loop.Tick(t, std::nullopt, {});
    // Wait for the tick's packets (heartbeat, relay, drive and maybe steer).
    std::size_t got = 0;
    WaitFor([&] {
      while (auto d = p.board->Poll()) {
        sim.Receive(*d, t);
        ++got;
      }
      return got >= r.sent.size();
    });
    p.board->Send(sim.Step(t, 0.02));
    WaitFor([&] { return false; }, 0.001);
    t += 0.02;
  }
  EXPECT_TRUE(r.decision.motor_power);
  EXPECT_EQ(r.frame.motor_units, 400);
  EXPECT_EQ(sim.counters().rx_rejected, 0u);
  EXPECT_GT(sim.counters().rx_ok, 400u);
  EXPECT_NEAR(sim.plant().v, 0.2, 0.01);
  EXPECT_EQ(loop.rejected_packets(), 0u);
}

struct Client {
  boost::asio::io_context ioc;
  websocket::stream<tcp::socket> ws{ioc};

  explicit Client(std::uint16_t port) {
    tcp::resolver resolver(ioc);
    boost::asio::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws.handshake("127.0.0.1", "/");
  }
  std::string Read() {
    beast::flat_buffer buf;
    ws.read(buf);
    return beast::buffers_to_string(buf.data());
  }
  void Write(const std::string& s) { ws.write(boost::asio::buffer(s)); }
};

TEST(UiServer, BroadcastsAndAcceptsCommands) {
  UiServer server(0, "127.0.0.1");
  ASSERT_NE(server.port(), 0);
  Client a(server.port());
  Client b(server.port());
  ASSERT_TRUE(WaitFor([&] { return server.client_count() == 2; }));

  server.Broadcast(R"({"type":"telemetry","frame":{}})");
  EXPECT_EQ(json::parse(a.Read())["type"], "telemetry");
  EXPECT_EQ(json::parse(b.Read())["type"], "telemetry");

  a.Write(R"({"type":"goal","x":4,"y":1})");
  b.Write(R"({"type":"estop"})");
  std::vector<gateway::UiCommand> cmds;
  ASSERT_TRUE(WaitFor([&] {
    for (auto& c : server.Drain()) cmds.push_back(c);
    return cmds.size() == 2;
  }));
  int goals = 0, estops = 0;
  for (const auto& c : cmds) {
    goals += std::holds_alternative<gateway::UiGoal>(c);
    estops += std::holds_alternative<gateway::UiEStop>(c);
  }
  EXPECT_EQ(goals, 1);
  EXPECT_EQ(estops, 1);
}

TEST(UiServer, RejectsMalformedMessages) {
  UiServer server(0, "127.0.0.1");
  Client c(server.port());
  c.Write("{not json");
  const json reply = json::parse(c.Read());
  EXPECT_EQ(reply["type"], "error");
  EXPECT_NE(reply["message"].get<std::string>().find("JSON"), std::string::npos);
  EXPECT_TRUE(WaitFor([&] { return server.rejected() == 1; }));
  EXPECT_TRUE(server.Drain().empty());
}

TEST(UiServer, SlowClientDropsOldFramesButGetsTheLatest) {
  UiServer server(0, "127.0.0.1");
  Client c(server.port());
  ASSERT_TRUE(WaitFor([&] { return server.client_count() == 1; }));
  const std::string pad(64 * 1024, 'x');
  constexpr int kFrames = 400;
  for (int i = 0; i < kFrames; ++i) {
    server.Broadcast(json{{"type", "telemetry"}, {"n", i}, {"pad", pad}}.dump());
  }
  int received = 0, last = -1;
  while (last != kFrames - 1) {
    const int n = json::parse(c.Read())["n"];
    ASSERT_GT(n, last);  // in order, never repeated
    last = n;
    ++received;
  }
  EXPECT_LT(received, kFrames);
}

TEST(UiServer, ClientDisconnectIsHandled) {
  UiServer server(0, "127.0.0.1");
  {
    Client c(server.port());
    ASSERT_TRUE(WaitFor([&] { return server.client_count() == 1; }));
    c.ws.close(websocket::close_code::normal);
  }
  EXPECT_TRUE(WaitFor([&] { return server.client_count() == 0; }));
  server.Broadcast("{}");  // nobody listening; must not throw
}

}  // namespace
}  // namespace podcar::net
