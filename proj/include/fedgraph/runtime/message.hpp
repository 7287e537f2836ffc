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
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fedgraph/common/tensor.hpp"

namespace fedgraph::runtime {

using ParticipantId = std::uint32_t;
inline constexpr ParticipantId kServerId = 0;
inline constexpr std::uint16_t kWireVersion = 1;

// Message types of the standard round protocol.
namespace msg {
inline constexpr std::string_view kJoin = "join";
inline constexpr std::string_view kAssignId = "assign_id";
inline constexpr std::string_view kModelPara = "model_para";
inline constexpr std::string_view kModelUpdate = "model_update";
inline constexpr std::string_view kEvaluate = "evaluate";
inline constexpr std::string_view kMetrics = "metrics";
inline constexpr std::string_view kFinish = "finish";
}  // namespace msg

// Prefix of gradient tensors travelling next to parameters in model_update.
inline constexpr std::string_view kGradPrefix = "grad/";

using Scalars = std::map<std::string, double>;

struct ParamsPayload {
  NamedTensorMap tensors;
  std::uint64_t sample_count = 1;
  Scalars scalars;
};

struct MetricsPayload {
  Scalars values;
};

enum class ControlKind { kJoin, kAssignId, kStart, kEvaluate, kFinish };
std::string_view to_string(ControlKind kind);

struct ControlPayload {
  ControlKind kind = ControlKind::kStart;
  Scalars scalars;
};

using Payload = std::variant<ParamsPayload, MetricsPayload, ControlPayload>;

struct Message {
  std::string msg_type;
  ParticipantId sender = kServerId;
  std::vector<ParticipantId> receivers;  // empty: every client
  std::uint64_t state = 0;               // round number
  Payload payload;
};

// Body layout: "FSGM", version u16, header length u32 (both big-endian),
// header JSON, then the tensors as packed little-endian f64 in header order.
std::string serialize_message(const Message& m);
// Throws MalformedFrame or VersionMismatch.
Message deserialize_message(std::string_view body);

// Bit-exact equality (tensors compared bytewise, NaN scalars equal).
bool identical(const Message& a, const Message& b);

}  // namespace fedgraph::runtime
