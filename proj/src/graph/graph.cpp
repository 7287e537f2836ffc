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

#include "fedgraph/graph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedgraph/common/error.hpp"

namespace fedgraph {
namespace {

[[noreturn]] void violation(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kInvariantViolation, field + ": " + what);
}

void resize_mask(std::vector<std::uint8_t>& mask, std::size_t n, const char* name) {
  if (mask.empty()) {
    mask.assign(n, 0);
  } else if (mask.size() != n) {
    throw Error(ErrorCode::kShapeMismatch, std::string("mask ") + name + " has length " +
                                               std::to_string(mask.size()) +
                                               ", expected " + std::to_string(n));
  }
}

}  // namespace

std::vector<Edge> Graph::edge_list() const {
  std::vector<Edge> edges;
  edges.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes; ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) edges.emplace_back(u, v);
    }
  }
  return edges;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

void Graph::validate() const {
  const std::size_t n = num_nodes;
  if (row_ptr.size() != n + 1) violation("row_ptr", "length != num_nodes + 1");
  if (row_ptr.front() != 0) violation("row_ptr", "row_ptr[0] != 0");
  if (row_ptr.back() != col_idx.size()) violation("row_ptr", "last offset != len(col_idx)");
  for (std::size_t u = 0; u < n; ++u) {
    if (row_ptr[u] > row_ptr[u + 1]) violation("row_ptr", "decreasing offsets");
  }
  if (!edge_weight.empty() && edge_weight.size() != col_idx.size()) {
    violation("edge_weight", "not aligned with col_idx");
  }
  for (NodeId u = 0; u < n; ++u) {
    auto nb = neighbors(u);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (nb[k] >= n) violation("col_idx", "node id " + std::to_string(nb[k]) + " out of range");
      if (k > 0 && nb[k] <= nb[k - 1]) violation("col_idx", "row not strictly increasing");
      if (nb[k] == u) violation("col_idx", "self-loop at node " + std::to_string(u));
    }
  }
  for (NodeId u = 0; u < n; ++u) {
    for (std::size_t k = row_ptr[u]; k < row_ptr[u + 1]; ++k) {
      NodeId v = col_idx[k];
      if (!has_edge(v, u)) {
        violation("col_idx", "asymmetric edge (" + std::to_string(u) + "," +
                                 std::to_string(v) + ")");
      }
      if (!edge_weight.empty()) {
        auto nb = neighbors(v);
        std::size_t back = row_ptr[v] + (std::lower_bound(nb.begin(), nb.end(), u) - nb.begin());
        if (edge_weight[back] != edge_weight[k]) violation("edge_weight", "asymmetric weights");
      }
    }
  }
  if (features.rows() != n) violation("features", "row count != num_nodes");
  if (labels.size() != n) violation("labels", "length != num_nodes");
  for (int y : labels) {
    if (y < kUnlabeled) violation("labels", "negative label other than -1");
  }
  const std::vector<std::uint8_t>* ms[] = {&masks.train, &masks.valid, &masks.test};
  const char* names[] = {"masks.train", "masks.valid", "masks.test"};
  for (int m = 0; m < 3; ++m) {
    if (ms[m]->size() != n) violation(names[m], "length != num_nodes");
  }
  for (std::size_t u = 0; u < n; ++u) {
    int count = 0;
    for (int m = 0; m < 3; ++m) count += (*ms[m])[u] ? 1 : 0;
    if (count > 1) violation("masks", "node " + std::to_string(u) + " in several masks");
    if (count == 1 && labels[u] == kUnlabeled) {
      violation("masks", "unlabeled node " + std::to_string(u) + " in a mask");
    }
  }
  for (const auto& [name, column] : node_attrs) {
    if (column.size() != n) violation("node_attrs." + name, "length != num_nodes");
  }
}

void GraphCollection::validate() const {
  if (graph_labels.size() != graphs.size()) {
    violation("graph_labels", "length != number of graphs");
  }
  if (!graph_props.empty() && graph_props.size() != graphs.size()) {
    violation("graph_props", "length != number of graphs");
  }
  for (const auto& g : graphs) g.validate();
}

Graph build_graph(std::span<const Edge> edges, std::size_t num_nodes, Tensor features,
                  std::vector<int> labels, NodeMasks masks) {
  if (features.empty() && features.rows() == 0) features = Tensor(num_nodes, 0);
  if (features.rows() != num_nodes) {
    throw Error(ErrorCode::kShapeMismatch, "features have " + std::to_string(features.rows()) +
                                               " rows, expected " + std::to_string(num_nodes));
  }
  if (labels.empty()) labels.assign(num_nodes, kUnlabeled);
  if (labels.size() != num_nodes) {
    throw Error(ErrorCode::kShapeMismatch, "labels have length " + std::to_string(labels.size()) +
                                               ", expected " + std::to_string(num_nodes));
  }
  resize_mask(masks.train, num_nodes, "train");
  resize_mask(masks.valid, num_nodes, "valid");
  resize_mask(masks.test, num_nodes, "test");

  std::vector<Edge> directed;
  directed.reserve(2 * edges.size());
  for (auto [u, v] : edges) {
    if (u >= num_nodes || v >= num_nodes) {
      throw Error(ErrorCode::kOutOfRangeNode, "edge (" + std::to_string(u) + "," +
                                                  std::to_string(v) + ") with num_nodes " +
                                                  std::to_string(num_nodes));
    }
    if (u == v) continue;
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  std::sort(directed.begin(), directed.end());
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  Graph g;
  g.num_nodes = num_nodes;
  g.row_ptr.assign(num_nodes + 1, 0);
  g.col_idx.reserve(directed.size());
  for (auto [u, v] : directed) {
    ++g.row_ptr[u + 1];
    g.col_idx.push_back(v);
  }
  for (std::size_t u = 0; u < num_nodes; ++u) g.row_ptr[u + 1] += g.row_ptr[u];
  g.features = std::move(features);
  g.labels = std::move(labels);
  g.masks = std::move(masks);
  return g;
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  auto first = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]);
  auto last = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[r + 1]);
  auto it = std::lower_bound(first, last, static_cast<NodeId>(c));
  if (it == last || *it != c) return 0.0;
  return values[static_cast<std::size_t>(it - col_idx.begin())];
}

Tensor spmm(const SparseMatrix& a, const Tensor& x) {
  if (a.cols != x.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "spmm: matrix cols != operand rows");
  }
  Tensor out(a.rows, x.cols());
  for (std::size_t r = 0; r < a.rows; ++r) {
    auto dst = out.row(r);
    for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      const double w = a.values[k];
      auto src = x.row(a.col_idx[k]);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += w * src[j];
    }
  }
  return out;
}

Tensor spmm_transposed(const SparseMatrix& a, const Tensor& x) {
  if (a.rows != x.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "spmm_transposed: matrix rows != operand rows");
  }
  Tensor out(a.cols, x.cols());
  for (std::size_t r = 0; r < a.rows; ++r) {
    auto src = x.row(r);
    for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      const double w = a.values[k];
      auto dst = out.row(a.col_idx[k]);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += w * src[j];
    }
  }
  return out;
}

SparseMatrix sym_normalized_adjacency(const Graph& g, bool add_self_loops) {
  const std::size_t n = g.num_nodes;
  std::vector<double> deg(n, add_self_loops ? 1.0 : 0.0);
  for (NodeId u = 0; u < n; ++u) deg[u] += static_cast<double>(g.degree(u));
  std::vector<double> inv_sqrt(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    if (deg[u] > 0) inv_sqrt[u] = 1.0 / std::sqrt(deg[u]);
  }

  SparseMatrix a;
  a.rows = a.cols = n;
  a.row_ptr.assign(1, 0);
  a.col_idx.reserve(g.col_idx.size() + (add_self_loops ? n : 0));
  a.values.reserve(a.col_idx.capacity());
  for (NodeId u = 0; u < n; ++u) {
    bool diag_done = !add_self_loops;
    for (NodeId v : g.neighbors(u)) {
      if (!diag_done && u < v) {
        a.col_idx.push_back(u);
        a.values.push_back(inv_sqrt[u] * inv_sqrt[u]);
        diag_done = true;
      }
      a.col_idx.push_back(v);
      a.values.push_back(inv_sqrt[u] * inv_sqrt[v]);
    }
    if (!diag_done) {
      a.col_idx.push_back(u);
      a.values.push_back(inv_sqrt[u] * inv_sqrt[u]);
    }
    a.row_ptr.push_back(a.col_idx.size());
  }
  return a;
}

SparseMatrix mean_adjacency(const Graph& g) {
  SparseMatrix a;
  a.rows = a.cols = g.num_nodes;
  a.row_ptr = g.row_ptr;
  a.col_idx = g.col_idx;
  a.values.resize(g.col_idx.size());
  for (NodeId u = 0; u < g.num_nodes; ++u) {
    const double w = 1.0 / static_cast<double>(std::max<std::size_t>(g.degree(u), 1));
    for (std::size_t k = g.row_ptr[u]; k < g.row_ptr[u + 1]; ++k) a.values[k] = w;
  }
  return a;
}

double edge_homophily(const Graph& g) {
  if (g.num_edges() == 0) throw Error(ErrorCode::kNoEdges, "edge_homophily on edgeless graph");
  std::size_t same = 0;
  std::size_t total = 0;
  for (NodeId u = 0; u < g.num_nodes; ++u) {
    for (NodeId v : g.neighbors(u)) {
      if (v <= u) continue;
      if (g.labels[u] == kUnlabeled || g.labels[v] == kUnlabeled) {
        throw Error(ErrorCode::kUnlabeledEndpoint,
                    "edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
      }
      ++total;
      if (g.labels[u] == g.labels[v]) ++same;
    }
  }
  return static_cast<double>(same) / static_cast<double>(total);
}

Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes) {
  std::vector<NodeId> old_ids(nodes.begin(), nodes.end());
  std::sort(old_ids.begin(), old_ids.end());
  old_ids.erase(std::unique(old_ids.begin(), old_ids.end()), old_ids.end());
  if (!old_ids.empty() && old_ids.back() >= g.num_nodes) {
    throw Error(ErrorCode::kOutOfRangeNode, "node " + std::to_string(old_ids.back()) +
                                                " >= " + std::to_string(g.num_nodes));
  }
  constexpr NodeId kAbsent = ~NodeId{0};
  std::vector<NodeId> new_id(g.num_nodes, kAbsent);
  for (std::size_t i = 0; i < old_ids.size(); ++i) new_id[old_ids[i]] = static_cast<NodeId>(i);

  const std::size_t n = old_ids.size();
  Graph sub;
  sub.num_nodes = n;
  sub.row_ptr.assign(1, 0);
  sub.features = Tensor(n, g.features.cols());
  sub.labels.resize(n);
  sub.masks.train.resize(n);
  sub.masks.valid.resize(n);
  sub.masks.test.resize(n);
  for (const auto& [name, column] : g.node_attrs) sub.node_attrs[name].resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const NodeId u = old_ids[i];
    // Old rows are sorted and the id map is monotone, so new rows stay sorted.
    for (std::size_t k = g.row_ptr[u]; k < g.row_ptr[u + 1]; ++k) {
      const NodeId v = new_id[g.col_idx[k]];
      if (v == kAbsent) continue;
      sub.col_idx.push_back(v);
      if (!g.edge_weight.empty()) sub.edge_weight.push_back(g.edge_weight[k]);
    }
    sub.row_ptr.push_back(sub.col_idx.size());
    auto src = g.features.row(u);
    std::copy(src.begin(), src.end(), sub.features.row(i).begin());
    sub.labels[i] = g.labels[u];
    sub.masks.train[i] = g.masks.train[u];
    sub.masks.valid[i] = g.masks.valid[u];
    sub.masks.test[i] = g.masks.test[u];
    for (const auto& [name, column] : g.node_attrs) sub.node_attrs[name][i] = column[u];
  }
  return {std::move(sub), std::move(old_ids)};
}

}  // namespace fedgraph
