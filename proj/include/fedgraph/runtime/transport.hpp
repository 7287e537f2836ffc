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

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fedgraph/runtime/course.hpp"
#include "fedgraph/runtime/message.hpp"

namespace fedgraph::runtime {

// Sees every message as it is sent, with its encoded body. Returning false
// drops the message.
using Tap = std::function<bool(const Message&, std::string_view body)>;

// Picks the id a joining client gets: the requested one when free, otherwise
// the smallest free id in [1, n].
class IdAllocator {
 public:
  explicit IdAllocator(std::uint32_t n) : n_(n) {}
  ParticipantId allocate(ParticipantId requested);
  const std::vector<ParticipantId>& assigned() const { return assigned_; }

 private:
  std::uint32_t n_;
  std::vector<ParticipantId> assigned_;  // ascending
};

// Single-threaded event loop. Messages are delivered in (state, sender,
// enqueue order) order and pass through the wire codec. Throws Deadlock when
// the queue drains before the server finishes.
RunReport run_simulation(Server& server, const std::vector<Client*>& clients, const Tap& tap = {});

inline constexpr std::size_t kDefaultFrameCap = std::size_t{256} << 20;

// Frame = 4-byte big-endian body length, then the body.
void write_frame(int fd, std::string_view body, std::size_t cap = kDefaultFrameCap);
// nullopt on orderly EOF before a frame starts. Throws FrameTooLarge,
// MalformedFrame (EOF mid-frame) or TransportError.
std::optional<std::string> read_frame(int fd, std::size_t cap = kDefaultFrameCap);

struct TcpServerOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks a free port
  std::size_t frame_cap = kDefaultFrameCap;
  std::function<void(std::uint16_t)> on_listening;  // called with the bound port
};

// Accepts exactly N connections, then runs the server until it finishes.
RunReport run_tcp_server(Server& server, const TcpServerOptions& opt);

struct TcpClientOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
  std::size_t frame_cap = kDefaultFrameCap;
  double connect_timeout_seconds = 30.0;
};

void run_tcp_client(Client& client, const TcpClientOptions& opt);

}  // namespace fedgraph::runtime
