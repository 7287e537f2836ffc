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
#include <span>
#include <vector>

#include "fedgraph/graph/graph.hpp"

namespace fedgraph::datazoo {

struct Partition {
  std::vector<std::size_t> community;  // node -> community id, dense from 0
  std::size_t num_communities = 0;
  double modularity = 0.0;
};

// Newman modularity of a node -> community assignment. Edge weights are used
// when present, otherwise every edge has weight one.
double modularity(const Graph& g, std::span<const std::size_t> community);

// Two-phase Louvain: local moves in ascending node order until no move
// improves modularity, then coarsening, repeated until a level makes no
// move. Gain ties go to the smallest community id. Community ids in the
// result follow first appearance in node order. Throws NoEdges.
Partition louvain_partition(const Graph& g);

}  // namespace fedgraph::datazoo
