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

#include <atomic>
#include <deque>
#include <mutex>
#include <set>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "podcar/error.h"

namespace podcar::net {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using asio::ip::tcp;
using asio::ip::udp;

// ---------------------------------------------------------------------------
// UDP

struct UdpLink::Impl {
  asio::io_context io;
  udp::socket socket{io};
  udp::endpoint peer;
  std::uint64_t send_errors = 0;
  std::array<std::uint8_t, 2048> buffer{};
};

UdpLink::UdpLink(std::uint16_t local_port, const std::string& peer_host,
                 std::uint16_t peer_port)
    : impl_(std::make_unique<Impl>()) {
  boost::system::error_code ec;
  udp::resolver resolver(impl_->io);
  const auto results = resolver.resolve(udp::v4(), peer_host, std::to_string(peer_port), ec);
  if (ec || results.empty()) {
    throw Error(ErrorCode::kLinkDown,
                fmt::format("cannot resolve {}:{}: {}", peer_host, peer_port, ec.message()));
  }
  impl_->peer = *results.begin();
  impl_->socket.open(udp::v4(), ec);
  if (!ec) impl_->socket.set_option(udp::socket::reuse_address(true), ec);
  if (!ec) impl_->socket.bind(udp::endpoint(udp::v4(), local_port), ec);
  if (!ec) impl_->socket.non_blocking(true, ec);
  if (ec) {
    throw Error(ErrorCode::kLinkDown,
                fmt::format("cannot bind UDP port {}: {}", local_port, ec.message()));
  }
}

UdpLink::~UdpLink() = default;

void UdpLink::Send(std::span<const std::uint8_t> bytes) {
  boost::system::error_code ec;
  impl_->socket.send_to(asio::buffer(bytes.data(), bytes.size()), impl_->peer, 0, ec);
  if (ec) ++impl_->send_errors;
}

std::optional<board::Datagram> UdpLink::Poll() {
  boost::system::error_code ec;
  udp::endpoint from;
  const std::size_t n = impl_->socket.receive_from(asio::buffer(impl_->buffer), from, 0, ec);
  if (ec) return std::nullopt;  // would_block, or a transient ICMP error
  return board::Datagram(impl_->buffer.begin(), impl_->buffer.begin() + n);
}

std::uint16_t UdpLink::local_port() const { return impl_->socket.local_endpoint().port(); }

std::uint64_t UdpLink::send_errors() const { return impl_->send_errors; }

// ---------------------------------------------------------------------------
// Websocket

namespace {

class Session;

}  // namespace

struct UiServer::Impl : std::enable_shared_from_this<UiServer::Impl> {
  asio::io_context io;
  tcp::acceptor acceptor{io};
  std::thread thread;

  // Touched only on the I/O thread.
  std::set<std::shared_ptr<Session>> sessions;

  mutable std::mutex mu;
  std::deque<gateway::UiCommand> inbox;
  std::atomic<std::size_t> clients{0};
  std::atomic<std::uint64_t> rejected{0};

  void Accept();
  void Remove(const std::shared_ptr<Session>& s) {
    sessions.erase(s);
    clients = sessions.size();
  }
};

namespace {

constexpr std::size_t kMaxQueuedFrames = 32;

class Session : public std::enable_shared_from_this<Session> {
 public:
  Session(tcp::socket socket, std::weak_ptr<UiServer::Impl> server)
      : ws_(std::move(socket)), server_(std::move(server)) {}

  void Start() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return self->Close();
      self->Read();
    });
  }

  void Send(std::shared_ptr<const std::string> text) {
    // Slow clients drop old frames rather than growing without bound.
    // The front frame stays put while a write is in flight.
    if (queue_.size() >= kMaxQueuedFrames) {
      queue_.erase(writing_ ? std::next(queue_.begin()) : queue_.begin());
    }
    queue_.push_back(std::move(text));
    if (!writing_) Write();
  }

 private:
  void Read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->Close();
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->Handle(text);
      self->Read();
    });
  }

  void Handle(const std::string& text) {
    auto server = server_.lock();
    if (!server) return;
    try {
      gateway::UiCommand cmd = gateway::ParseUiCommand(text);
      std::lock_guard lock(server->mu);
      server->inbox.push_back(std::move(cmd));
    } catch (const Error& e) {
      ++server->rejected;
      const nlohmann::json reply = {{"type", "error"}, {"message", e.what()}};
      Send(std::make_shared<const std::string>(reply.dump()));
    }
  }

  void Write() {
    writing_ = true;
    ws_.text(true);
    ws_.async_write(asio::buffer(*queue_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) return self->Close();
                      self->queue_.pop_front();
                      if (self->queue_.empty()) {
                        self->writing_ = false;
                      } else {
                        self->Write();
                      }
                    });
  }

  void Close() {
    if (closed_) return;
    closed_ = true;
    if (auto server = server_.lock()) server->Remove(shared_from_this());
  }

  websocket::stream<beast::tcp_stream> ws_;
  std::weak_ptr<UiServer::Impl> server_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  bool writing_ = false;
  bool closed_ = false;
};

}  // namespace

void UiServer::Impl::Accept() {
  acceptor.async_accept([self = shared_from_this()](beast::error_code ec, tcp::socket socket) {
    if (ec) {
      if (ec == asio::error::operation_aborted) return;
    } else {
      auto session = std::make_shared<Session>(std::move(socket), self);
      self->sessions.insert(session);
      self->clients = self->sessions.size();
      session->Start();
    }
    self->Accept();
  });
}

UiServer::UiServer(std::uint16_t port, const std::string& address)
    : impl_(std::make_shared<Impl>()) {
  boost::system::error_code ec;
  const auto addr = asio::ip::make_address(address, ec);
  if (ec) throw Error(ErrorCode::kBadConfig, fmt::format("bad UI address '{}'", address));
  const tcp::endpoint endpoint(addr, port);
  impl_->acceptor.open(endpoint.protocol(), ec);
  if (!ec) impl_->acceptor.set_option(asio::socket_base::reuse_address(true), ec);
  if (!ec) impl_->acceptor.bind(endpoint, ec);
  if (!ec) impl_->acceptor.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) {
    throw Error(ErrorCode::kLinkDown,
                fmt::format("cannot listen on {}:{}: {}", address, port, ec.message()));
  }
  impl_->Accept();
  impl_->thread = std::thread([impl = impl_] { impl->io.run(); });
}

UiServer::~UiServer() {
  asio::post(impl_->io, [impl = impl_] {
    boost::system::error_code ec;
    impl->acceptor.close(ec);
    impl->sessions.clear();
    impl->io.stop();
  });
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::uint16_t UiServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void UiServer::Broadcast(std::string text) {
  auto shared = std::make_shared<const std::string>(std::move(text));
  asio::post(impl_->io, [impl = impl_, shared] {
    for (const auto& s : impl->sessions) s->Send(shared);
  });
}

std::vector<gateway::UiCommand> UiServer::Drain() {
  std::lock_guard lock(impl_->mu);
  std::vector<gateway::UiCommand> out(impl_->inbox.begin(), impl_->inbox.end());
  impl_->inbox.clear();
  return out;
}

std::size_t UiServer::client_count() const { return impl_->clients; }

std::uint64_t UiServer::rejected() const { return impl_->rejected; }

}  // namespace podcar::net
