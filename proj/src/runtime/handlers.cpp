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

#include "fedgraph/runtime/handlers.hpp"

#include "fedgraph/common/error.hpp"

namespace fedgraph::runtime {

void HandlerRegistry::register_handler(std::string_view msg_type, Handler handler) {
  if (!handlers_.emplace(std::string(msg_type), std::move(handler)).second) {
    throw Error(ErrorCode::kDuplicateHandler, "handler for \"" + std::string(msg_type) + "\" already registered");
  }
}

void HandlerRegistry::unregister_handler(std::string_view msg_type) {
  auto it = handlers_.find(msg_type);
  if (it != handlers_.end()) handlers_.erase(it);
}

bool HandlerRegistry::has_handler(std::string_view msg_type) const {
  return handlers_.find(msg_type) != handlers_.end();
}

void HandlerRegistry::dispatch(const Message& m, Context& ctx) const {
  auto it = handlers_.find(m.msg_type);
  if (it == handlers_.end()) {
    throw Error(ErrorCode::kUnknownMessageType,
                "no handler for \"" + m.msg_type + "\" (from " + std::to_string(m.sender) + ")");
  }
  it->second(m, ctx);
}

}  // namespace fedgraph::runtime
