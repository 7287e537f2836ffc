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

#include <functional>
#include <map>
#include <string>
#include <string_view>

#include "fedgraph/runtime/message.hpp"

namespace fedgraph::runtime {

// What a handler may do besides reading its message: send more messages.
class Context {
 public:
  virtual ~Context() = default;
  virtual void send(Message m) = 0;
};

using Handler = std::function<void(const Message&, Context&)>;

class HandlerRegistry {
 public:
  // Throws DuplicateHandler if msg_type already has a handler.
  void register_handler(std::string_view msg_type, Handler handler);
  void unregister_handler(std::string_view msg_type);
  bool has_handler(std::string_view msg_type) const;
  // Throws UnknownMessageType when no handler is registered.
  void dispatch(const Message& m, Context& ctx) const;

 private:
  std::map<std::string, Handler, std::less<>> handlers_;
};

class Participant {
 public:
  virtual ~Participant() = default;
  virtual ParticipantId id() const = 0;
  // Called once when the transport is up, before any delivery.
  virtual void on_start(Context&) {}
  virtual bool finished() const = 0;

  HandlerRegistry& handlers() { return handlers_; }
  const HandlerRegistry& handlers() const { return handlers_; }

 private:
  HandlerRegistry handlers_;
};

}  // namespace fedgraph::runtime
