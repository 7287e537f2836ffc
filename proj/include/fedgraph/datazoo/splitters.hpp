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
#include <span>
#include <string>
#include <vector>

#include "fedgraph/common/rng.hpp"
#include "fedgraph/datazoo/dataset.hpp"
#include "fedgraph/graph/graph.hpp"

namespace fedgraph::datazoo {

struct RandomSplitOptions {
  bool overlap = false;
  // With overlap, this fraction of nodes is copied into one extra client.
  double overlap_frac = 0.1;
  // Fraction of each client's edges removed, floor(frac * m) of them.
  double drop_edge_frac = 0.0;
};

// Shuffled near-equal node partition (sizes differ by at most one).
FederatedDataset random_splitter(const Graph& g, std::size_t num_clients,
                                 const RandomSplitOptions& options, std::uint64_t seed);

// Louvain communities packed onto clients largest-first, each onto the
// currently smallest client. When there are fewer communities than clients
// the largest community is halved at random until there are enough.
FederatedDataset community_splitter(const Graph& g, std::size_t num_clients,
                                    std::uint64_t seed);

// Groups nodes by a categorical column and packs the groups like
// community_splitter.
FederatedDataset attribute_splitter(const Graph& g, const std::string& attr,
                                    std::size_t num_clients);

// Dirichlet label skew over the labeled nodes of a graph.
FederatedDataset label_space_splitter(const Graph& g, std::size_t num_clients, double alpha,
                                      std::uint64_t seed);
// Dirichlet label skew over the graphs of a collection.
FederatedDataset label_space_splitter(const GraphCollection& c, std::size_t num_clients,
                                      double alpha, std::uint64_t seed);

// Sorts graphs by graph_props and hands out contiguous segments; the first
// (count % N) segments get one extra graph.
FederatedDataset instance_space_splitter(const GraphCollection& c, std::size_t num_clients);

// Replays a split recorded in a manifest.
FederatedDataset split_from_manifest(const Graph& g, const Manifest& manifest);
FederatedDataset split_from_manifest(const GraphCollection& c, const Manifest& manifest);

// Building blocks, exposed for testing.

// Returns, per client, the indices of the groups it receives.
std::vector<std::vector<std::size_t>> greedy_balance(std::span<const std::size_t> group_sizes,
                                                     std::size_t num_clients);

// Client index per item. For every class a proportion vector is drawn from
// Dirichlet(alpha) and the class's items are assigned by categorical draws.
// Empty clients are repaired by moving a random item from the largest client.
std::vector<std::size_t> lda_assign(std::span<const int> item_labels, std::size_t num_clients,
                                    double alpha, Rng& rng);

// Per-class shuffled train/valid/test masks; unlabeled nodes stay out.
NodeMasks stratified_masks(std::span<const int> labels, double train_ratio, double valid_ratio,
                           Rng& rng);

// Copies g without the listed undirected edges (u < v).
Graph remove_edges(const Graph& g, std::span<const Edge> edges);

}  // namespace fedgraph::datazoo
