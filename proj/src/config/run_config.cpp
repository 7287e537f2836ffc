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

#include "fedgraph/config/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "fedgraph/common/error.hpp"
#include "fedgraph/common/hash.hpp"
#include "fedgraph/graph/graph_io.hpp"

namespace fedgraph::config {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kConfigError, path + ": " + what);
}

const json& csbm_defaults() {
  static const json d = {{"clients", 8},   {"nodes", 250}, {"dim", 16},  {"deg", 10.0},
                         {"mu", 1.0},      {"phi", json::array()},     {"lambda_max", -1.0},
                         {"train_ratio", 0.6}, {"valid_ratio", 0.2}, {"seed", 0}};
  return d;
}

// Element type of list-valued keys.
enum class Elem { kUint, kNumber, kString };
const std::map<std::string, Elem>& list_elements() {
  static const std::map<std::string, Elem> m{{"model.encoder", Elem::kUint},
                                             {"model.decoder", Elem::kUint},
                                             {"personalization", Elem::kString},
                                             {"data.csbm.phi", Elem::kNumber}};
  return m;
}

void check_value(const std::string& path, const json& def, const json& v) {
  if (def.is_boolean()) {
    if (!v.is_boolean()) bad(path, "expected true/false");
  } else if (def.is_number_unsigned() || def.is_number_integer()) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      bad(path, "expected a non-negative integer, got " + v.dump());
    }
  } else if (def.is_number()) {
    if (!v.is_number()) bad(path, "expected a number, got " + v.dump());
  } else if (def.is_string()) {
    if (!v.is_string()) bad(path, "expected a string, got " + v.dump());
  } else if (def.is_array()) {
    if (!v.is_array()) bad(path, "expected a list, got " + v.dump());
    const Elem e = list_elements().at(path);
    for (const auto& x : v) {
      const bool ok = e == Elem::kString ? x.is_string()
                      : e == Elem::kNumber ? x.is_number()
                                           : x.is_number_unsigned();
      if (!ok) bad(path, "unexpected list element " + x.dump());
    }
  }
}

// Overlays `user` onto `def`, rejecting keys that `def` does not have.
json merge(const std::string& path, const json& def, const json& user) {
  if (!user.is_object()) bad(path.empty() ? "config" : path, "expected an object");
  json out = def;
  for (const auto& [key, v] : user.items()) {
    const std::string p = path.empty() ? key : path + "." + key;
    if (!def.contains(key)) bad(p, "unknown key");
    const json& d = def.at(key);
    if (d.is_object()) {
      out[key] = merge(p, d, v);
    } else {
      check_value(p, d, v);
      out[key] = v;
    }
  }
  return out;
}

json merge_data(const json& user) {
  json out = {{"path", ""}, {"csbm", nullptr}};
  if (!user.is_object()) bad("data", "expected an object");
  for (const auto& [key, v] : user.items()) {
    if (key == "path") {
      if (!v.is_string()) bad("data.path", "expected a string");
      out["path"] = v;
    } else if (key == "csbm") {
      if (!v.is_null()) out["csbm"] = merge("data.csbm", csbm_defaults(), v);
    } else {
      bad("data." + key, "unknown key");
    }
  }
  const bool has_path = !out["path"].get<std::string>().empty();
  if (has_path == !out["csbm"].is_null()) bad("data", "give exactly one of path or csbm");
  return out;
}

json normalize(const json& user) {
  if (!user.is_object()) bad("config", "expected an object");
  json rest = user;
  json data = rest.contains("data") ? rest["data"] : json::object();
  rest.erase("data");
  json out = merge("", RunConfig::defaults(), rest);
  out["data"] = merge_data(data);
  return out;
}

void validate_semantics(const json& t) {
  const auto& m = t.at("model");
  const auto kind = m.at("kind").get<std::string>();
  nn::gnn_kind_from_string(kind);
  if (m.at("hidden").get<std::uint64_t>() < 1) bad("model.hidden", "must be >= 1");
  if (m.at("num_layers").get<std::uint64_t>() < 1) bad("model.num_layers", "must be >= 1");
  const double dropout = m.at("dropout").get<double>();
  if (!(dropout >= 0.0 && dropout < 1.0)) bad("model.dropout", "must lie in [0, 1)");
  const auto& f = t.at("federation");
  const double rate = f.at("sample_rate").get<double>();
  if (!(rate > 0.0 && rate <= 1.0)) bad("federation.sample_rate", "must lie in (0, 1]");
  if (f.at("total_rounds").get<std::uint64_t>() < 1) bad("federation.total_rounds", "must be >= 1");
  if (f.at("eval_every").get<std::uint64_t>() < 1) bad("federation.eval_every", "must be >= 1");
  const auto& tr = t.at("train");
  if (tr.at("local_steps").get<std::uint64_t>() < 1) bad("train.local_steps", "must be >= 1");
  for (const char* k : {"lr", "weight_decay", "prox_mu"}) {
    if (tr.at(k).get<double>() < 0.0) bad(std::string("train.") + k, "must be >= 0");
  }
  const auto& a = t.at("aggregator");
  algos::aggregator_kind_from_string(a.at("kind").get<std::string>());
  const double beta = a.at("momentum").get<double>();
  if (!(beta >= 0.0 && beta < 1.0)) bad("aggregator.momentum", "must lie in [0, 1)");
  if (!(a.at("server_lr").get<double>() > 0.0)) bad("aggregator.server_lr", "must be positive");
  algos::PersonalizationSpec::parse(t.at("personalization").get<std::vector<std::string>>());
  if (!t.at("data").at("csbm").is_null()) {
    const auto& c = t.at("data").at("csbm");
    const auto phi = c.at("phi").get<std::vector<double>>();
    if (phi.size() != c.at("clients").get<std::size_t>()) {
      bad("data.csbm.phi", "has " + std::to_string(phi.size()) + " entries for " +
                               std::to_string(c.at("clients").get<std::size_t>()) + " clients");
    }
    try {
      csbm_from_json(c).validate();
    } catch (const Error& e) {
      bad("data.csbm", e.what());
    }
  }
}

}  // namespace

const nlohmann::json& RunConfig::defaults() {
  static const json d = {
      {"model",
       {{"kind", "gcn"},
        {"hidden", 64},
        {"num_layers", 2},
        {"k_prop", 10},
        {"alpha", 0.1},
        {"dropout", 0.5},
        {"encoder", json::array()},
        {"decoder", json::array()}}},
      {"federation", {{"clients_per_round", 0}, {"sample_rate", 1.0}, {"total_rounds", 50}, {"eval_every", 1}}},
      {"train", {{"local_steps", 1}, {"lr", 0.25}, {"weight_decay", 5e-4}, {"prox_mu", 0.0}}},
      {"aggregator", {{"kind", "fedavg"}, {"server_lr", 1.0}, {"momentum", 0.9}}},
      {"personalization", json::array({"*->shared"})},
      {"monitor", {{"enabled", true}, {"log_dir", ""}}},
      {"output", {{"dir", ""}}},
      {"seed", 0},
  };
  return d;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  c.tree_ = normalize(j);
  validate_semantics(c.tree_);
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, path.string() + ": not valid JSON: " + e.what());
  }
  return from_json(j);
}

void RunConfig::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) bad(assignment, "expected key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  json next = tree_;
  json* node = &next;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object()) bad(key, "is not a section");
    if (dot == std::string::npos) {
      if (!node->contains(part)) bad(key, "unknown key");
      (*node)[part] = value;
      break;
    }
    if (!node->contains(part)) bad(key, "unknown key");
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
  if (key == "data.path" && next["data"]["path"] != "") next["data"]["csbm"] = nullptr;
  if (key.starts_with("data.csbm")) next["data"]["path"] = "";
  *this = from_json(next);
}

std::string RunConfig::hash() const {
  json h = tree_;
  h.erase("monitor");
  h.erase("output");
  return sha256_hex(h.dump());
}

std::filesystem::path RunConfig::log_dir() const { return tree_.at("monitor").at("log_dir").get<std::string>(); }
std::filesystem::path RunConfig::output_dir() const { return tree_.at("output").at("dir").get<std::string>(); }

datazoo::CsbmParams csbm_from_json(const nlohmann::json& c) {
  datazoo::CsbmParams p;
  p.nodes_per_client = c.at("nodes").get<std::size_t>();
  p.feature_dim = c.at("dim").get<std::size_t>();
  p.avg_degree = c.at("deg").get<double>();
  p.mu = c.at("mu").get<double>();
  p.phi_per_client = c.at("phi").get<std::vector<double>>();
  p.lambda_max = c.at("lambda_max").get<double>();
  p.train_ratio = c.at("train_ratio").get<double>();
  p.valid_ratio = c.at("valid_ratio").get<double>();
  p.seed = c.at("seed").get<std::uint64_t>();
  return p;
}

datazoo::FederatedDataset RunConfig::load_data() const {
  const auto& d = tree_.at("data");
  if (!d.at("csbm").is_null()) return datazoo::fedcsbm_generate(csbm_from_json(d.at("csbm")));
  return datazoo::load_dataset(d.at("path").get<std::string>());
}

std::uint32_t clients_for_rate(double rate, std::uint32_t n) {
  const double k = std::round(rate * static_cast<double>(n));
  return static_cast<std::uint32_t>(std::clamp(k, 1.0, static_cast<double>(n)));
}

std::pair<std::size_t, std::size_t> dataset_dims(const datazoo::FederatedDataset& ds) {
  if (ds.graph_level()) throw Error(ErrorCode::kConfigError, "federated runs need a node-level dataset");
  if (ds.graphs.empty()) throw Error(ErrorCode::kInvalidParams, "dataset has no clients");
  const std::size_t in_dim = ds.graphs[0].features.cols();
  int max_label = -1;
  for (const auto& g : ds.graphs) {
    if (g.features.cols() != in_dim) throw Error(ErrorCode::kShapeMismatch, "clients differ in feature width");
    for (int l : g.labels) max_label = std::max(max_label, l);
  }
  if (max_label < 0) throw Error(ErrorCode::kInvalidParams, "dataset has no labeled nodes");
  return {in_dim, static_cast<std::size_t>(max_label) + 1};
}

runtime::CourseConfig RunConfig::course(const datazoo::FederatedDataset& ds) const {
  auto [in_dim, classes] = dataset_dims(ds);
  return course(in_dim, classes, static_cast<std::uint32_t>(ds.num_clients()));
}

runtime::CourseConfig RunConfig::course(std::size_t in_dim, std::size_t num_classes,
                                        std::uint32_t num_clients) const {
  runtime::CourseConfig c;
  const auto& m = tree_.at("model");
  const auto hidden = m.at("hidden").get<std::size_t>();
  const auto layers = m.at("num_layers").get<std::size_t>();
  auto encoder = m.at("encoder").get<std::vector<std::size_t>>();
  auto decoder = m.at("decoder").get<std::vector<std::size_t>>();
  c.model.in_dim = in_dim;
  c.model.num_classes = num_classes;
  c.model.kind = nn::gnn_kind_from_string(m.at("kind").get<std::string>());
  c.model.k_prop = m.at("k_prop").get<std::size_t>();
  c.model.gpr_alpha = m.at("alpha").get<double>();
  c.model.dropout = m.at("dropout").get<double>();
  // The last layer of the body outputs the classes unless a decoder follows.
  std::vector<std::size_t> body(layers, hidden);
  if (decoder.empty()) {
    body.back() = num_classes;
  } else {
    decoder.push_back(num_classes);
  }
  if (c.model.kind == nn::GnnKind::kGprgnn) {
    encoder.insert(encoder.end(), body.begin(), body.end());
  } else {
    c.model.gnn_dims = body;
  }
  c.model.encoder = encoder;
  c.model.decoder = decoder;

  const auto& f = tree_.at("federation");
  c.federation.num_clients = num_clients;
  const auto k = f.at("clients_per_round").get<std::uint32_t>();
  c.federation.clients_per_round = k > 0 ? k : clients_for_rate(f.at("sample_rate").get<double>(), num_clients);
  c.federation.total_rounds = f.at("total_rounds").get<std::uint64_t>();
  c.federation.eval_every = f.at("eval_every").get<std::uint64_t>();

  const auto& t = tree_.at("train");
  c.train.local_steps = t.at("local_steps").get<std::uint32_t>();
  c.train.lr = t.at("lr").get<double>();
  c.train.weight_decay = t.at("weight_decay").get<double>();
  c.train.prox_mu = t.at("prox_mu").get<double>();

  const auto& a = tree_.at("aggregator");
  c.aggregator.kind = algos::aggregator_kind_from_string(a.at("kind").get<std::string>());
  c.aggregator.server_lr = a.at("server_lr").get<double>();
  c.aggregator.momentum = a.at("momentum").get<double>();
  c.personalization = algos::PersonalizationSpec::parse(tree_.at("personalization").get<std::vector<std::string>>());
  c.seed = seed();
  c.monitor = monitor_enabled();
  c.validate();
  return c;
}

}  // namespace fedgraph::config
