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

#include "fedgraph/datazoo/louvain.hpp"

#include <algorithm>
#include <limits>
#include <utility>

#include "fedgraph/common/error.hpp"

namespace fedgraph::datazoo {
namespace {

// Symmetric weighted graph with explicit self-loop weights, the working
// representation across coarsening levels.
struct WeightedGraph {
  std::vector<std::vector<std::pair<std::size_t, double>>> adj;  // excludes loops
  std::vector<double> loop;
  std::vector<double> strength;  // k_i = loop_i + sum of incident weights
  double total = 0.0;            // 2m

  std::size_t size() const { return adj.size(); }
};

WeightedGraph from_graph(const Graph& g) {
  WeightedGraph w;
  const std::size_t n = g.num_nodes;
  w.adj.resize(n);
  w.loop.assign(n, 0.0);
  w.strength.assign(n, 0.0);
  for (NodeId u = 0; u < n; ++u) {
    for (std::size_t k = g.row_ptr[u]; k < g.row_ptr[u + 1]; ++k) {
      const double weight = g.edge_weight.empty() ? 1.0 : g.edge_weight[k];
      w.adj[u].emplace_back(g.col_idx[k], weight);
      w.strength[u] += weight;
    }
    w.total += w.strength[u];
  }
  return w;
}

// Moves nodes between communities until a full pass makes no move. Returns
// whether any node moved.
bool local_moves(const WeightedGraph& g, std::vector<std::size_t>& comm) {
  const std::size_t n = g.size();
  std::vector<double> tot(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) tot[comm[i]] += g.strength[i];

  std::vector<double> link(n, 0.0);
  std::vector<std::size_t> touched;
  constexpr double kMinGain = 1e-12;
  bool moved_any = false;
  bool moved = true;
  while (moved) {
    moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t own = comm[i];
      const double k_i = g.strength[i];
      touched.clear();
      for (auto [j, w] : g.adj[i]) {
        const std::size_t c = comm[j];
        if (link[c] == 0.0) touched.push_back(c);  // weights are positive
        link[c] += w;
      }
      tot[own] -= k_i;
      const double own_gain = link[own] - tot[own] * k_i / g.total;
      std::sort(touched.begin(), touched.end());
      std::size_t best = own;
      double best_gain = -std::numeric_limits<double>::infinity();
      for (std::size_t c : touched) {
        if (c == own) continue;
        const double gain = link[c] - tot[c] * k_i / g.total;
        if (gain > best_gain) {
          best_gain = gain;
          best = c;
        }
      }
      if (best == own || !(best_gain > own_gain + kMinGain)) best = own;
      tot[best] += k_i;
      if (best != own) {
        comm[i] = best;
        moved = true;
        moved_any = true;
      }
      for (std::size_t c : touched) link[c] = 0.0;
      link[own] = 0.0;
    }
  }
  return moved_any;
}

// Renumbers communities densely by first appearance; returns the count.
std::size_t renumber(std::vector<std::size_t>& comm) {
  std::vector<std::size_t> id(comm.size(), std::numeric_limits<std::size_t>::max());
  std::size_t next = 0;
  for (auto& c : comm) {
    if (id[c] == std::numeric_limits<std::size_t>::max()) id[c] = next++;
    c = id[c];
  }
  return next;
}

WeightedGraph aggregate(const WeightedGraph& g, const std::vector<std::size_t>& comm,
                        std::size_t count) {
  WeightedGraph out;
  out.adj.resize(count);
  out.loop.assign(count, 0.0);
  out.strength.assign(count, 0.0);
  out.total = g.total;
  std::vector<std::vector<std::pair<std::size_t, double>>> raw(count);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t ci = comm[i];
    out.loop[ci] += g.loop[i];
    out.strength[ci] += g.strength[i];
    for (auto [j, w] : g.adj[i]) {
      if (comm[j] == ci) {
        out.loop[ci] += w;
      } else {
        raw[ci].emplace_back(comm[j], w);
      }
    }
  }
  for (std::size_t c = 0; c < count; ++c) {
    auto& r = raw[c];
    std::sort(r.begin(), r.end());
    for (auto [d, w] : r) {
      if (!out.adj[c].empty() && out.adj[c].back().first == d) {
        out.adj[c].back().second += w;
      } else {
        out.adj[c].emplace_back(d, w);
      }
    }
  }
  return out;
}

}  // namespace

double modularity(const Graph& g, std::span<const std::size_t> community) {
  if (community.size() != g.num_nodes) {
    throw Error(ErrorCode::kShapeMismatch, "community vector length != num_nodes");
  }
  const WeightedGraph w = from_graph(g);
  if (w.total == 0.0) return 0.0;
  const std::size_t count =
      community.empty() ? 0 : *std::max_element(community.begin(), community.end()) + 1;
  std::vector<double> inside(count, 0.0), tot(count, 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    tot[community[i]] += w.strength[i];
    for (auto [j, weight] : w.adj[i]) {
      if (community[j] == community[i]) inside[community[i]] += weight;
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < count; ++c) {
    q += inside[c] / w.total - (tot[c] / w.total) * (tot[c] / w.total);
  }
  return q;
}

Partition louvain_partition(const Graph& g) {
  if (g.num_edges() == 0) throw Error(ErrorCode::kNoEdges, "louvain_partition needs at least one edge");
  WeightedGraph level = from_graph(g);
  std::vector<std::size_t> node_comm(g.num_nodes);
  for (std::size_t i = 0; i < node_comm.size(); ++i) node_comm[i] = i;

  while (true) {
    std::vector<std::size_t> comm(level.size());
    for (std::size_t i = 0; i < comm.size(); ++i) comm[i] = i;
    if (!local_moves(level, comm)) break;
    const std::size_t count = renumber(comm);
    for (auto& c : node_comm) c = comm[c];
    if (count == level.size()) break;
    level = aggregate(level, comm, count);
  }

  Partition p;
  p.community = std::move(node_comm);
  p.num_communities = renumber(p.community);
  p.modularity = modularity(g, p.community);
  return p;
}

}  // namespace fedgraph::datazoo
