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

#include "fedgraph/tuner/checkpoint.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "fedgraph/common/bytes.hpp"
#include "fedgraph/common/error.hpp"
#include "fedgraph/common/hash.hpp"
#include "fedgraph/graph/graph_io.hpp"

namespace fedgraph::tuner {
namespace {

using nlohmann::ordered_json;
constexpr std::string_view kMagic = "FSGC";
constexpr std::size_t kPrefix = 10;

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorCode::kCorruptCheckpoint, what); }

ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double number_from(const ordered_json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

struct Parsed {
  ordered_json header;
  std::map<std::string, Tensor> tensors;
};

Parsed parse(std::string_view bytes) {
  if (bytes.size() < kPrefix || bytes.substr(0, 4) != kMagic) corrupt("not a checkpoint (bad magic or truncated)");
  const auto version = bytes::get_u16_be(bytes.data() + 4);
  if (version != kCheckpointVersion) corrupt("unsupported checkpoint version " + std::to_string(version));
  const auto header_len = bytes::get_u32_be(bytes.data() + 6);
  if (bytes.size() - kPrefix < header_len) corrupt("header runs past the end of the file");
  Parsed p;
  try {
    p.header = ordered_json::parse(bytes.substr(kPrefix, header_len));
    const std::string_view data = bytes.substr(kPrefix + header_len);
    std::size_t expect = 0;
    for (const auto& d : p.header.at("tensors")) {
      const auto name = d.at("name").get<std::string>();
      const auto rows = d.at("rows").get<std::size_t>();
      const auto cols = d.at("cols").get<std::size_t>();
      const auto offset = d.at("offset").get<std::size_t>();
      if (offset != expect) corrupt("tensor \"" + name + "\" at unexpected offset");
      if (cols != 0 && rows > (data.size() - offset) / 8 / cols) corrupt("tensor \"" + name + "\" is truncated");
      std::vector<double> v(rows * cols);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = bytes::get_f64_le(data.data() + offset + 8 * i);
      if (!p.tensors.emplace(name, Tensor(rows, cols, std::move(v))).second) corrupt("duplicate tensor " + name);
      expect = offset + rows * cols * 8;
    }
    if (expect != data.size()) corrupt("trailing bytes after the tensor data");
  } catch (const nlohmann::json::exception& e) {
    corrupt(std::string("bad header: ") + e.what());
  }
  return p;
}

NamedTensorMap take_prefix(std::map<std::string, Tensor>& all, const std::string& prefix) {
  NamedTensorMap out;
  for (auto it = all.lower_bound(prefix); it != all.end() && it->first.starts_with(prefix);) {
    out.emplace(it->first.substr(prefix.size()), std::move(it->second));
    it = all.erase(it);
  }
  return out;
}

}  // namespace

std::string save_checkpoint(const runtime::CourseState& state, const std::string& config_hash) {
  const auto& s = state.server;
  ordered_json h;
  h["format"] = "fedgraph-checkpoint";
  h["round"] = s.round;
  h["config_hash"] = config_hash;
  h["aggregator"] = {{"kind", algos::to_string(s.aggregator.kind)},
                     {"server_lr", s.aggregator.server_lr},
                     {"momentum", s.aggregator.momentum}};
  h["server_rng"] = s.rng;
  if (s.best) {
    const auto& b = *s.best;
    h["best"] = {{"round", b.round},
                 {"train_loss", number(b.train_loss)},
                 {"val_loss", number(b.val_loss)},
                 {"val_acc", number(b.val_acc)},
                 {"test_loss", number(b.test_loss)},
                 {"test_acc", number(b.test_acc)}};
  } else {
    h["best"] = nullptr;
  }
  ordered_json clients = ordered_json::array();
  for (const auto& c : state.clients) clients.push_back({{"id", c.id}, {"rng", c.rng}});
  h["clients"] = std::move(clients);

  std::vector<std::pair<std::string, const Tensor*>> tensors;
  for (const auto& [name, t] : s.global) tensors.emplace_back("global/" + name, &t);
  for (const auto& [name, t] : s.aggregator.velocity) tensors.emplace_back("velocity/" + name, &t);
  for (const auto& c : state.clients) {
    for (const auto& [name, t] : c.local_params) {
      tensors.emplace_back("client/" + std::to_string(c.id) + "/" + name, &t);
    }
  }
  ordered_json descriptors = ordered_json::array();
  std::size_t offset = 0;
  for (const auto& [name, t] : tensors) {
    descriptors.push_back({{"name", name}, {"rows", t->rows()}, {"cols", t->cols()}, {"offset", offset}});
    offset += t->size() * 8;
  }
  h["tensors"] = std::move(descriptors);
  const std::string header = h.dump();

  std::string out(kMagic);
  bytes::put_u16_be(out, kCheckpointVersion);
  bytes::put_u32_be(out, static_cast<std::uint32_t>(header.size()));
  out += header;
  for (const auto& [_, t] : tensors) {
    for (double v : t->data()) bytes::put_f64_le(out, v);
  }
  return out;
}

runtime::CourseState restore_checkpoint(std::string_view bytes, const std::string& expected_hash) {
  Parsed p = parse(bytes);
  runtime::CourseState st;
  try {
    const auto& h = p.header;
    const auto hash = h.at("config_hash").get<std::string>();
    if (!expected_hash.empty() && hash != expected_hash) {
      throw Error(ErrorCode::kConfigHashMismatch,
                  "checkpoint was written for config " + hash.substr(0, 12) + ", current config is " +
                      expected_hash.substr(0, 12));
    }
    auto& s = st.server;
    s.round = h.at("round").get<std::uint64_t>();
    const auto& a = h.at("aggregator");
    s.aggregator.kind = algos::aggregator_kind_from_string(a.at("kind").get<std::string>());
    s.aggregator.server_lr = a.at("server_lr").get<double>();
    s.aggregator.momentum = a.at("momentum").get<double>();
    s.rng = h.at("server_rng").get<std::vector<std::uint64_t>>();
    if (!h.at("best").is_null()) {
      const auto& b = h.at("best");
      s.best = runtime::EvalSummary{b.at("round").get<std::uint64_t>(), number_from(b.at("train_loss")),
                                    number_from(b.at("val_loss")),      number_from(b.at("val_acc")),
                                    number_from(b.at("test_loss")),     number_from(b.at("test_acc"))};
    }
    s.global = take_prefix(p.tensors, "global/");
    s.aggregator.velocity = take_prefix(p.tensors, "velocity/");
    for (const auto& c : h.at("clients")) {
      runtime::ClientState cs;
      cs.id = c.at("id").get<runtime::ParticipantId>();
      cs.rng = c.at("rng").get<std::vector<std::uint64_t>>();
      cs.local_params = take_prefix(p.tensors, "client/" + std::to_string(cs.id) + "/");
      st.clients.push_back(std::move(cs));
    }
    if (!p.tensors.empty()) corrupt("unclaimed tensor \"" + p.tensors.begin()->first + "\"");
  } catch (const nlohmann::json::exception& e) {
    corrupt(std::string("bad header: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError) corrupt(e.what());
    throw;
  }
  // RNG words must form a valid engine state.
  try {
    Rng probe;
    probe.set_state(st.server.rng);
    for (const auto& c : st.clients) probe.set_state(c.rng);
  } catch (const Error& e) {
    corrupt(e.what());
  }
  return st;
}

void save_checkpoint_file(const std::filesystem::path& path, const runtime::CourseState& state,
                          const std::string& config_hash) {
  write_file(path, save_checkpoint(state, config_hash));
}

runtime::CourseState restore_checkpoint_file(const std::filesystem::path& path, const std::string& expected_hash) {
  return restore_checkpoint(read_file(path), expected_hash);
}

nlohmann::ordered_json describe_checkpoint(std::string_view bytes) {
  Parsed p = parse(bytes);
  ordered_json out = p.header;
  for (auto& d : out["tensors"]) {
    const Tensor& t = p.tensors.at(d["name"].get<std::string>());
    std::string raw;
    for (double v : t.data()) bytes::put_f64_le(raw, v);
    d["sha256"] = sha256_hex(raw);
  }
  return out;
}

}  // namespace fedgraph::tuner
