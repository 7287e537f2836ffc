// Copyright 2026 The fedgraph Authors.
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

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <map>
#include <mutex>
#include <thread>
#include <utility>

#include "fedgraph/common/bytes.hpp"
#include "fedgraph/common/error.hpp"
#include "fedgraph/runtime/transport.hpp"

namespace fedgraph::runtime {
namespace {

[[noreturn]] void sys_fail(const std::string& what) {
  throw Error(ErrorCode::kTransportError, what + ": " + std::strerror(errno));
}

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  ~Fd() { reset(); }
  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

sockaddr_in make_addr(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    throw Error(ErrorCode::kConfigError, "not an IPv4 address: \"" + host + "\"");
  }
  return addr;
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

// Returns false on EOF before the first byte.
bool read_exact(int fd, char* buf, std::size_t n) {
  std::size_t got = 0;
  while (got < n) {
    const ssize_t r = ::recv(fd, buf + got, n - got, 0);
    if (r == 0) {
      if (got == 0) return false;
      throw Error(ErrorCode::kMalformedFrame, "connection closed mid-frame");
    }
    if (r < 0) {
      if (errno == EINTR) continue;
      sys_fail("recv");
    }
    got += static_cast<std::size_t>(r);
  }
  return true;
}

struct Event {
  std::size_t conn;
  std::optional<std::string> body;  // nullopt: connection ended
  std::string error;
};

class EventQueue {
 public:
  void push(Event e) {
    {
      std::lock_guard lock(mu_);
      events_.push_back(std::move(e));
    }
    cv_.notify_one();
  }
  Event pop() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !events_.empty(); });
    Event e = std::move(events_.front());
    events_.pop_front();
    return e;
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Event> events_;
};

}  // namespace

void write_frame(int fd, std::string_view body, std::size_t cap) {
  if (body.size() > cap || body.size() > 0xffffffffu) {
    throw Error(ErrorCode::kFrameTooLarge, "frame of " + std::to_string(body.size()) + " bytes exceeds cap " +
                                               std::to_string(cap));
  }
  std::string header;
  bytes::put_u32_be(header, static_cast<std::uint32_t>(body.size()));
  for (std::string_view part : {std::string_view(header), body}) {
    std::size_t sent = 0;
    while (sent < part.size()) {
      const ssize_t w = ::send(fd, part.data() + sent, part.size() - sent, MSG_NOSIGNAL);
      if (w < 0) {
        if (errno == EINTR) continue;
        sys_fail("send");
      }
      sent += static_cast<std::size_t>(w);
    }
  }
}

std::optional<std::string> read_frame(int fd, std::size_t cap) {
  char len_buf[4];
  if (!read_exact(fd, len_buf, 4)) return std::nullopt;
  const std::uint32_t len = bytes::get_u32_be(len_buf);
  if (len > cap) {
    throw Error(ErrorCode::kFrameTooLarge, "incoming frame of " + std::to_string(len) + " bytes exceeds cap " +
                                               std::to_string(cap));
  }
  std::string body(len, '\0');
  if (len > 0 && !read_exact(fd, body.data(), len)) {
    throw Error(ErrorCode::kMalformedFrame, "connection closed mid-frame");
  }
  return body;
}

RunReport run_tcp_server(Server& server, const TcpServerOptions& opt) {
  Fd listener(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (listener.get() < 0) sys_fail("socket");
  int one = 1;
  ::setsockopt(listener.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr = make_addr(opt.host, opt.port);
  if (::bind(listener.get(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
    sys_fail("bind " + opt.host + ":" + std::to_string(opt.port));
  }
  if (::listen(listener.get(), 64) < 0) sys_fail("listen");
  socklen_t len = sizeof(addr);
  ::getsockname(listener.get(), reinterpret_cast<sockaddr*>(&addr), &len);
  if (opt.on_listening) opt.on_listening(ntohs(addr.sin_port));

  const std::uint32_t num_clients = server.num_clients();
  std::vector<Fd> conns;
  while (conns.size() < num_clients) {
    int fd = ::accept4(listener.get(), nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) {
      if (errno == EINTR) continue;
      sys_fail("accept");
    }
    set_nodelay(fd);
    conns.emplace_back(fd);
  }

  EventQueue events;
  std::vector<std::thread> readers;
  auto shutdown_all = [&] {
    for (auto& c : conns) ::shutdown(c.get(), SHUT_RDWR);
    for (auto& t : readers) t.join();
    readers.clear();
  };
  for (std::size_t i = 0; i < conns.size(); ++i) {
    readers.emplace_back([&events, &opt, fd = conns[i].get(), i] {
      try {
        while (auto body = read_frame(fd, opt.frame_cap)) events.push(Event{i, std::move(body), {}});
        events.push(Event{i, std::nullopt, {}});
      } catch (const std::exception& e) {
        events.push(Event{i, std::nullopt, e.what()});
      }
    });
  }

  IdAllocator ids(num_clients);
  std::map<ParticipantId, std::size_t> conn_of;
  std::vector<ParticipantId> id_of(conns.size(), kServerId);

  class Ctx : public Context {
   public:
    Ctx(const std::vector<Fd>& conns, const std::map<ParticipantId, std::size_t>& conn_of, std::size_t cap)
        : conns_(conns), conn_of_(conn_of), cap_(cap) {}
    void send(Message m) override {
      const std::string body = serialize_message(m);
      if (m.receivers.empty()) {
        for (const auto& [id, c] : conn_of_) write_frame(conns_[c].get(), body, cap_);
      } else {
        for (ParticipantId id : m.receivers) {
          auto it = conn_of_.find(id);
          if (it == conn_of_.end()) throw Error(ErrorCode::kTransportError, "no client with id " + std::to_string(id));
          write_frame(conns_[it->second].get(), body, cap_);
        }
      }
    }

   private:
    const std::vector<Fd>& conns_;
    const std::map<ParticipantId, std::size_t>& conn_of_;
    std::size_t cap_;
  } ctx(conns, conn_of, opt.frame_cap);

  try {
    while (!server.finished()) {
      Event e = events.pop();
      if (!e.body) {
        throw Error(ErrorCode::kTransportError,
                    "connection " + std::to_string(e.conn) + " (client " + std::to_string(id_of[e.conn]) +
                        ") closed" + (e.error.empty() ? "" : ": " + e.error) + "; " + server.pending());
      }
      Message m = deserialize_message(*e.body);
      if (m.msg_type == msg::kJoin) {
        if (id_of[e.conn] != kServerId) throw Error(ErrorCode::kTransportError, "second join on one connection");
        const ParticipantId id = ids.allocate(m.sender);
        id_of[e.conn] = id;
        conn_of[id] = e.conn;
        m.sender = id;
      } else if (m.sender != id_of[e.conn]) {
        throw Error(ErrorCode::kTransportError, "connection of client " + std::to_string(id_of[e.conn]) +
                                                    " sent as " + std::to_string(m.sender));
      }
      server.handlers().dispatch(m, ctx);
    }
  } catch (...) {
    shutdown_all();
    throw;
  }
  shutdown_all();
  return server.report();
}

void run_tcp_client(Client& client, const TcpClientOptions& opt) {
  const sockaddr_in addr = make_addr(opt.host, opt.port);
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(opt.connect_timeout_seconds));
  Fd fd;
  for (;;) {
    fd = Fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (fd.get() < 0) sys_fail("socket");
    if (::connect(fd.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) == 0) break;
    if (std::chrono::steady_clock::now() >= deadline) {
      sys_fail("connect " + opt.host + ":" + std::to_string(opt.port));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  set_nodelay(fd.get());

  class Ctx : public Context {
   public:
    Ctx(int fd, std::size_t cap) : fd_(fd), cap_(cap) {}
    void send(Message m) override { write_frame(fd_, serialize_message(m), cap_); }

   private:
    int fd_;
    std::size_t cap_;
  } ctx(fd.get(), opt.frame_cap);

  client.on_start(ctx);
  while (!client.finished()) {
    auto body = read_frame(fd.get(), opt.frame_cap);
    if (!body) throw Error(ErrorCode::kTransportError, "server closed the connection");
    client.handlers().dispatch(deserialize_message(*body), ctx);
  }
}

}  // namespace fedgraph::runtime
