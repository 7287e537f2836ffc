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

#include "fedgraph/runtime/message.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "fedgraph/common/bytes.hpp"
#include "fedgraph/common/error.hpp"
#include "json.hpp"

namespace fedgraph::runtime {
namespace {

using nlohmann::ordered_json;

constexpr std::string_view kMagic = "FSGM";
constexpr std::size_t kPrefix = 4 + 2 + 4;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedFrame, what);
}

ordered_json scalars_to_json(const Scalars& s) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : s) {
    if (std::isfinite(v)) {
      j[k] = v;
    } else {
      j[k] = nullptr;  // JSON has no NaN; decoded back as NaN
    }
  }
  return j;
}

Scalars scalars_from_json(const ordered_json& j) {
  if (!j.is_object()) malformed("scalars must be an object");
  Scalars s;
  for (const auto& [k, v] : j.items()) {
    if (v.is_null()) {
      s[k] = std::numeric_limits<double>::quiet_NaN();
    } else if (v.is_number()) {
      s[k] = v.get<double>();
    } else {
      malformed("scalar \"" + k + "\" is not a number");
    }
  }
  return s;
}

ControlKind control_from_string(std::string_view s) {
  for (auto k : {ControlKind::kJoin, ControlKind::kAssignId, ControlKind::kStart,
                 ControlKind::kEvaluate, ControlKind::kFinish}) {
    if (to_string(k) == s) return k;
  }
  malformed("unknown control kind \"" + std::string(s) + "\"");
}

bool same_scalars(const Scalars& a, const Scalars& b) {
  if (a.size() != b.size()) return false;
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (std::bit_cast<std::uint64_t>(ia->second) != std::bit_cast<std::uint64_t>(ib->second) &&
        !(std::isnan(ia->second) && std::isnan(ib->second))) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::string_view to_string(ControlKind kind) {
  switch (kind) {
    case ControlKind::kJoin: return "join";
    case ControlKind::kAssignId: return "assign_id";
    case ControlKind::kStart: return "start";
    case ControlKind::kEvaluate: return "evaluate";
    case ControlKind::kFinish: return "finish";
  }
  return "?";
}

std::string serialize_message(const Message& m) {
  ordered_json h;
  h["msg_type"] = m.msg_type;
  h["sender"] = m.sender;
  h["receivers"] = m.receivers;
  h["state"] = m.state;
  const NamedTensorMap* tensors = nullptr;
  if (const auto* p = std::get_if<ParamsPayload>(&m.payload)) {
    h["payload_kind"] = "params";
    h["sample_count"] = p->sample_count;
    tensors = &p->tensors;
    h["scalars"] = scalars_to_json(p->scalars);
  } else if (const auto* mt = std::get_if<MetricsPayload>(&m.payload)) {
    h["payload_kind"] = "metrics";
    h["scalars"] = scalars_to_json(mt->values);
  } else {
    const auto& c = std::get<ControlPayload>(m.payload);
    h["payload_kind"] = "control";
    h["control"] = to_string(c.kind);
    h["scalars"] = scalars_to_json(c.scalars);
  }
  ordered_json descriptors = ordered_json::array();
  std::size_t offset = 0;
  if (tensors != nullptr) {
    for (const auto& [name, t] : *tensors) {
      descriptors.push_back({{"name", name}, {"rows", t.rows()}, {"cols", t.cols()}, {"offset", offset}});
      offset += t.size() * 8;
    }
  }
  h["tensors"] = std::move(descriptors);
  const std::string header = h.dump();

  std::string out;
  out.reserve(kPrefix + header.size() + offset);
  out.append(kMagic);
  bytes::put_u16_be(out, kWireVersion);
  bytes::put_u32_be(out, static_cast<std::uint32_t>(header.size()));
  out.append(header);
  if (tensors != nullptr) {
    for (const auto& [_, t] : *tensors) {
      for (double v : t.data()) bytes::put_f64_le(out, v);
    }
  }
  return out;
}

Message deserialize_message(std::string_view body) {
  if (body.size() < kPrefix) malformed("frame of " + std::to_string(body.size()) + " bytes is truncated");
  if (body.substr(0, 4) != kMagic) malformed("bad magic");
  const std::uint16_t version = bytes::get_u16_be(body.data() + 4);
  if (version != kWireVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "wire version " + std::to_string(version) + ", expected " + std::to_string(kWireVersion));
  }
  const std::uint32_t header_len = bytes::get_u32_be(body.data() + 6);
  if (body.size() - kPrefix < header_len) malformed("header runs past the end of the frame");
  ordered_json h;
  try {
    h = ordered_json::parse(body.substr(kPrefix, header_len));
  } catch (const nlohmann::json::exception& e) {
    malformed(std::string("header is not JSON: ") + e.what());
  }
  const std::string_view data = body.substr(kPrefix + header_len);

  Message m;
  try {
    m.msg_type = h.at("msg_type").get<std::string>();
    m.sender = h.at("sender").get<ParticipantId>();
    m.receivers = h.at("receivers").get<std::vector<ParticipantId>>();
    m.state = h.at("state").get<std::uint64_t>();
    const auto kind = h.at("payload_kind").get<std::string>();
    const auto& descriptors = h.at("tensors");
    if (!descriptors.is_array()) malformed("tensors must be an array");
    if (kind != "params" && !descriptors.empty()) malformed(kind + " payload carries tensors");
    if (kind == "params") {
      ParamsPayload p;
      p.sample_count = h.at("sample_count").get<std::uint64_t>();
      p.scalars = scalars_from_json(h.at("scalars"));
      std::size_t expect = 0;
      for (const auto& d : descriptors) {
        const auto name = d.at("name").get<std::string>();
        const auto rows = d.at("rows").get<std::size_t>();
        const auto cols = d.at("cols").get<std::size_t>();
        const auto offset = d.at("offset").get<std::size_t>();
        if (offset != expect) malformed("tensor \"" + name + "\" has offset " + std::to_string(offset));
        if (cols != 0 && rows > (data.size() - offset) / 8 / cols) {
          malformed("tensor \"" + name + "\" runs past the end of the frame");
        }
        std::vector<double> values(rows * cols);
        for (std::size_t i = 0; i < values.size(); ++i) values[i] = bytes::get_f64_le(data.data() + offset + 8 * i);
        if (!p.tensors.emplace(name, Tensor(rows, cols, std::move(values))).second) {
          malformed("duplicate tensor \"" + name + "\"");
        }
        expect = offset + rows * cols * 8;
      }
      if (expect != data.size()) malformed("frame has " + std::to_string(data.size() - expect) + " trailing bytes");
      m.payload = std::move(p);
    } else if (kind == "metrics") {
      m.payload = MetricsPayload{scalars_from_json(h.at("scalars"))};
      if (!data.empty()) malformed("trailing bytes after metrics header");
    } else if (kind == "control") {
      m.payload = ControlPayload{control_from_string(h.at("control").get<std::string>()),
                                 scalars_from_json(h.at("scalars"))};
      if (!data.empty()) malformed("trailing bytes after control header");
    } else {
      malformed("unknown payload_kind \"" + kind + "\"");
    }
  } catch (const nlohmann::json::exception& e) {
    malformed(std::string("bad header field: ") + e.what());
  }
  return m;
}

bool identical(const Message& a, const Message& b) {
  if (a.msg_type != b.msg_type || a.sender != b.sender || a.receivers != b.receivers ||
      a.state != b.state || a.payload.index() != b.payload.index()) {
    return false;
  }
  if (const auto* pa = std::get_if<ParamsPayload>(&a.payload)) {
    const auto& pb = std::get<ParamsPayload>(b.payload);
    return pa->sample_count == pb.sample_count && bitwise_equal(pa->tensors, pb.tensors) &&
           same_scalars(pa->scalars, pb.scalars);
  }
  if (const auto* ma = std::get_if<MetricsPayload>(&a.payload)) {
    return same_scalars(ma->values, std::get<MetricsPayload>(b.payload).values);
  }
  const auto& ca = std::get<ControlPayload>(a.payload);
  const auto& cb = std::get<ControlPayload>(b.payload);
  return ca.kind == cb.kind && same_scalars(ca.scalars, cb.scalars);
}

}  // namespace fedgraph::runtime
