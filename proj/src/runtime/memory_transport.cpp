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

#include <algorithm>
#include <map>
#include <queue>
#include <tuple>

#include "fedgraph/common/error.hpp"
#include "fedgraph/runtime/transport.hpp"

namespace fedgraph::runtime {

ParticipantId IdAllocator::allocate(ParticipantId requested) {
  auto taken = [&](ParticipantId id) {
    return std::binary_search(assigned_.begin(), assigned_.end(), id);
  };
  ParticipantId id = 0;
  if (requested >= 1 && requested <= n_ && !taken(requested)) {
    id = requested;
  } else {
    for (ParticipantId c = 1; c <= n_; ++c) {
      if (!taken(c)) {
        id = c;
        break;
      }
    }
  }
  if (id == 0) throw Error(ErrorCode::kTransportError, "more clients joined than configured");
  assigned_.insert(std::upper_bound(assigned_.begin(), assigned_.end(), id), id);
  return id;
}

namespace {

struct Envelope {
  std::uint64_t state;
  ParticipantId sender;
  std::uint64_t seq;
  Participant* dest;
  std::string body;

  bool operator>(const Envelope& o) const {
    return std::tie(state, sender, seq) > std::tie(o.state, o.sender, o.seq);
  }
};

class Bus {
 public:
  Bus(Server& server, const std::vector<Client*>& clients, const Tap& tap, std::uint32_t n)
      : server_(server), clients_(clients), tap_(tap), ids_(n) {}

  class Ctx : public Context {
   public:
    Ctx(Bus& bus, Participant& self) : bus_(bus), self_(self) {}
    void send(Message m) override { bus_.send(self_, std::move(m)); }

   private:
    Bus& bus_;
    Participant& self_;
  };

  void send(Participant& from, Message m) {
    if (&from != &server_) {
      if (m.msg_type == msg::kJoin) {
        const ParticipantId id = ids_.allocate(m.sender);
        by_id_[id] = &from;
        m.sender = id;
      } else if (m.sender != from.id()) {
        throw Error(ErrorCode::kTransportError, "client " + std::to_string(from.id()) + " sent as " +
                                                    std::to_string(m.sender));
      }
    }
    std::string body = serialize_message(m);
    if (tap_ && !tap_(m, body)) return;
    std::vector<Participant*> dests;
    if (&from != &server_) {
      dests.push_back(&server_);
    } else if (m.receivers.empty()) {
      for (ParticipantId id : ids_.assigned()) dests.push_back(by_id_.at(id));
    } else {
      for (ParticipantId id : m.receivers) {
        auto it = by_id_.find(id);
        if (it == by_id_.end()) throw Error(ErrorCode::kTransportError, "no client with id " + std::to_string(id));
        dests.push_back(it->second);
      }
    }
    for (Participant* d : dests) queue_.push(Envelope{m.state, m.sender, seq_++, d, body});
  }

  RunReport run() {
    for (Client* c : clients_) {
      Ctx ctx(*this, *c);
      c->on_start(ctx);
    }
    while (!queue_.empty()) {
      Envelope e = queue_.top();
      queue_.pop();
      Message m = deserialize_message(e.body);
      Ctx ctx(*this, *e.dest);
      e.dest->handlers().dispatch(m, ctx);
    }
    if (!server_.finished()) {
      throw Error(ErrorCode::kDeadlock, "message queue drained; " + server_.pending());
    }
    return server_.report();
  }

 private:
  Server& server_;
  const std::vector<Client*>& clients_;
  const Tap& tap_;
  IdAllocator ids_;
  std::map<ParticipantId, Participant*> by_id_;
  std::priority_queue<Envelope, std::vector<Envelope>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
};

}  // namespace

RunReport run_simulation(Server& server, const std::vector<Client*>& clients, const Tap& tap) {
  Bus bus(server, clients, tap, static_cast<std::uint32_t>(clients.size()));
  return bus.run();
}

}  // namespace fedgraph::runtime
