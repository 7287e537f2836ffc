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

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fedgraph/common/tensor.hpp"

namespace fedgraph {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

inline constexpr int kUnlabeled = -1;

struct NodeMasks {
  std::vector<std::uint8_t> train;
  std::vector<std::uint8_t> valid;
  std::vector<std::uint8_t> test;

  friend bool operator==(const NodeMasks&, const NodeMasks&) = default;
};

// Undirected graph in CSR form with dense node features. Each undirected edge
// is stored in both endpoint rows; rows are strictly increasing.
struct Graph {
  std::size_t num_nodes = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<NodeId> col_idx;
  std::vector<double> edge_weight;  // empty, or aligned with col_idx
  Tensor features;
  std::vector<int> labels;
  NodeMasks masks;
  // Categorical node columns, used by the attribute splitter.
  std::map<std::string, std::vector<std::string>> node_attrs;

  std::size_t num_edges() const { return col_idx.size() / 2; }
  std::size_t degree(NodeId u) const { return row_ptr[u + 1] - row_ptr[u]; }
  std::span<const NodeId> neighbors(NodeId u) const {
    return {col_idx.data() + row_ptr[u], degree(u)};
  }
  // Undirected edges (u < v) in row order.
  std::vector<Edge> edge_list() const;
  bool has_edge(NodeId u, NodeId v) const;

  // Throws InvariantViolation naming the offending field.
  void validate() const;

  friend bool operator==(const Graph&, const Graph&) = default;
};

// A set of graphs for graph-level tasks.
struct GraphCollection {
  std::vector<Graph> graphs;
  std::vector<int> graph_labels;
  std::vector<double> graph_props;  // empty when absent

  void validate() const;
  friend bool operator==(const GraphCollection&, const GraphCollection&) = default;
};

// Builds a valid graph from an arbitrary edge list: edges are symmetrized,
// self-loops dropped and duplicates merged. Empty masks mean "no node".
Graph build_graph(std::span<const Edge> edges, std::size_t num_nodes,
                  Tensor features = {}, std::vector<int> labels = {},
                  NodeMasks masks = {});

// Weighted CSR matrix.
struct SparseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<NodeId> col_idx;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const;
};

// A * X.
Tensor spmm(const SparseMatrix& a, const Tensor& x);
// A^T * X.
Tensor spmm_transposed(const SparseMatrix& a, const Tensor& x);

// D^-1/2 (A + I) D^-1/2 when add_self_loops, else D^-1/2 A D^-1/2. Degrees
// include the self-loop when it is added.
SparseMatrix sym_normalized_adjacency(const Graph& g, bool add_self_loops = true);

// Row-normalized adjacency (neighbour mean); isolated rows are empty.
SparseMatrix mean_adjacency(const Graph& g);

// Fraction of undirected edges whose endpoints share a label.
double edge_homophily(const Graph& g);

struct Subgraph {
  Graph graph;
  std::vector<NodeId> old_ids;  // new id -> old id, ascending
};

// Keeps exactly the edges with both endpoints in `nodes`. New ids follow
// ascending old ids.
Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes);

}  // namespace fedgraph
