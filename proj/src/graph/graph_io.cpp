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

#include "fedgraph/graph/graph_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "fedgraph/common/error.hpp"

namespace fedgraph {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void violation(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kInvariantViolation, field + ": " + what);
}

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::kParseError, std::string("missing key \"") + key + "\"");
  return *it;
}

template <typename T>
T as(const json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, field + ": " + e.what());
  }
}

std::vector<std::uint8_t> mask_from_ids(const json& ids, std::size_t n, const std::string& field) {
  std::vector<std::uint8_t> mask(n, 0);
  for (const auto& id : ids) {
    auto u = as<std::int64_t>(id, field);
    if (u < 0 || static_cast<std::size_t>(u) >= n) {
      violation(field, "node id " + std::to_string(u) + " out of range");
    }
    mask[static_cast<std::size_t>(u)] = 1;
  }
  return mask;
}

ordered_json mask_to_ids(const std::vector<std::uint8_t>& mask) {
  ordered_json ids = ordered_json::array();
  for (std::size_t u = 0; u < mask.size(); ++u) {
    if (mask[u]) ids.push_back(u);
  }
  return ids;
}

json parse_json(const std::string& text, const std::filesystem::path& path) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

}  // namespace

ordered_json graph_to_json(const Graph& g) {
  ordered_json j;
  j["format_version"] = 1;
  j["directed"] = false;
  j["num_nodes"] = g.num_nodes;
  ordered_json edges = ordered_json::array();
  ordered_json weights = ordered_json::array();
  for (NodeId u = 0; u < g.num_nodes; ++u) {
    for (std::size_t k = g.row_ptr[u]; k < g.row_ptr[u + 1]; ++k) {
      if (g.col_idx[k] <= u) continue;
      edges.push_back({u, g.col_idx[k]});
      if (!g.edge_weight.empty()) weights.push_back(g.edge_weight[k]);
    }
  }
  j["edges"] = std::move(edges);
  if (!g.edge_weight.empty()) j["edge_weights"] = std::move(weights);
  ordered_json features = ordered_json::array();
  for (std::size_t r = 0; r < g.features.rows(); ++r) {
    auto row = g.features.row(r);
    features.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["features"] = std::move(features);
  j["labels"] = g.labels;
  j["masks"] = {{"train", mask_to_ids(g.masks.train)},
                {"valid", mask_to_ids(g.masks.valid)},
                {"test", mask_to_ids(g.masks.test)}};
  if (!g.node_attrs.empty()) {
    ordered_json attrs = ordered_json::object();
    for (const auto& [name, column] : g.node_attrs) attrs[name] = column;
    j["node_attrs"] = std::move(attrs);
  }
  return j;
}

Graph graph_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kParseError, "graph must be a JSON object");
  const auto version = as<int>(require(j, "format_version"), "format_version");
  if (version != 1) throw Error(ErrorCode::kParseError, "unsupported format_version " + std::to_string(version));
  const bool directed = j.contains("directed") ? as<bool>(j["directed"], "directed") : false;
  const auto num_nodes_signed = as<std::int64_t>(require(j, "num_nodes"), "num_nodes");
  if (num_nodes_signed < 0) violation("num_nodes", "negative");
  const auto n = static_cast<std::size_t>(num_nodes_signed);

  const json& edges_json = require(j, "edges");
  if (!edges_json.is_array()) throw Error(ErrorCode::kParseError, "edges: expected array");
  std::vector<Edge> edges;
  edges.reserve(edges_json.size());
  for (const auto& e : edges_json) {
    if (!e.is_array() || e.size() != 2) throw Error(ErrorCode::kParseError, "edges: expected [u,v] pairs");
    auto u = as<std::int64_t>(e[0], "edges");
    auto v = as<std::int64_t>(e[1], "edges");
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n) {
      violation("edges", "endpoint of (" + std::to_string(u) + "," + std::to_string(v) +
                             ") outside [0," + std::to_string(n) + ")");
    }
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  }
  if (directed) {
    std::set<Edge> present(edges.begin(), edges.end());
    for (auto [u, v] : edges) {
      if (u != v && !present.contains({v, u})) {
        violation("edges", "directed graph has edge (" + std::to_string(u) + "," +
                               std::to_string(v) + ") without its reverse");
      }
    }
  }

  Tensor features(n, 0);
  if (j.contains("features")) {
    const json& fj = j["features"];
    if (!fj.is_array() || fj.size() != n) violation("features", "row count != num_nodes");
    const std::size_t dim = n ? fj[0].size() : 0;
    features = Tensor(n, dim);
    for (std::size_t r = 0; r < n; ++r) {
      if (!fj[r].is_array() || fj[r].size() != dim) violation("features", "ragged rows");
      for (std::size_t c = 0; c < dim; ++c) features(r, c) = as<double>(fj[r][c], "features");
    }
  }
  std::vector<int> labels(n, kUnlabeled);
  if (j.contains("labels")) {
    labels = as<std::vector<int>>(j["labels"], "labels");
    if (labels.size() != n) violation("labels", "length != num_nodes");
  }
  NodeMasks masks;
  if (j.contains("masks")) {
    const json& mj = j["masks"];
    masks.train = mask_from_ids(mj.value("train", json::array()), n, "masks.train");
    masks.valid = mask_from_ids(mj.value("valid", json::array()), n, "masks.valid");
    masks.test = mask_from_ids(mj.value("test", json::array()), n, "masks.test");
  }

  Graph g = build_graph(edges, n, std::move(features), std::move(labels), std::move(masks));
  if (j.contains("edge_weights")) {
    auto weights = as<std::vector<double>>(j["edge_weights"], "edge_weights");
    if (weights.size() != edges.size()) violation("edge_weights", "length != len(edges)");
    g.edge_weight.assign(g.col_idx.size(), 0.0);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      auto [u, v] = edges[i];
      if (u == v) continue;
      for (auto [a, b] : {Edge{u, v}, Edge{v, u}}) {
        auto nb = g.neighbors(a);
        std::size_t k = g.row_ptr[a] + (std::lower_bound(nb.begin(), nb.end(), b) - nb.begin());
        g.edge_weight[k] = weights[i];
      }
    }
  }
  if (j.contains("node_attrs")) {
    for (const auto& [name, column] : j["node_attrs"].items()) {
      std::vector<std::string> values;
      values.reserve(column.size());
      for (const auto& v : column) values.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      g.node_attrs[name] = std::move(values);
    }
  }
  g.validate();
  return g;
}

void save_graph(const Graph& g, const std::filesystem::path& path) {
  write_file(path, graph_to_json(g).dump());
}

Graph load_graph(const std::filesystem::path& path) {
  return graph_from_json(parse_json(read_file(path), path));
}

ordered_json collection_to_json(const GraphCollection& c) {
  ordered_json j;
  j["format_version"] = 1;
  ordered_json graphs = ordered_json::array();
  for (const auto& g : c.graphs) graphs.push_back(graph_to_json(g));
  j["graphs"] = std::move(graphs);
  j["graph_labels"] = c.graph_labels;
  if (!c.graph_props.empty()) j["graph_props"] = c.graph_props;
  return j;
}

GraphCollection collection_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kParseError, "collection must be a JSON object");
  GraphCollection c;
  for (const auto& gj : require(j, "graphs")) c.graphs.push_back(graph_from_json(gj));
  c.graph_labels = as<std::vector<int>>(require(j, "graph_labels"), "graph_labels");
  if (j.contains("graph_props")) c.graph_props = as<std::vector<double>>(j["graph_props"], "graph_props");
  c.validate();
  return c;
}

void save_collection(const GraphCollection& c, const std::filesystem::path& path) {
  write_file(path, collection_to_json(c).dump());
}

GraphCollection load_collection(const std::filesystem::path& path) {
  return collection_from_json(parse_json(read_file(path), path));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::kIoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIoError, "rename to " + path.string() + ": " + ec.message());
}

}  // namespace fedgraph
