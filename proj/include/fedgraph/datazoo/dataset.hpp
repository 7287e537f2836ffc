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
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "fedgraph/graph/graph.hpp"

namespace fedgraph::datazoo {

struct Manifest {
  std::string splitter;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::uint64_t seed = 0;
  std::size_t num_clients = 0;
  std::string source_sha256;

  nlohmann::ordered_json to_json() const;
  static Manifest from_json(const nlohmann::ordered_json& j);
};

// Per-client data produced by a splitter or generator. Node-level datasets
// fill `graphs`; graph-level datasets fill `collections`.
struct FederatedDataset {
  Manifest manifest;
  std::vector<Graph> graphs;
  std::vector<GraphCollection> collections;
  // Source node (or graph) ids held by each client. Kept in memory only.
  std::vector<std::vector<NodeId>> source_ids;

  bool graph_level() const { return !collections.empty(); }
  std::size_t num_clients() const {
    return graph_level() ? collections.size() : graphs.size();
  }
};

// SHA-256 of the canonical JSON encoding.
std::string fingerprint(const Graph& g);
std::string fingerprint(const GraphCollection& c);

// Writes manifest.json and client_<i>.json for i in [0, N).
void save_dataset(const FederatedDataset& ds, const std::filesystem::path& dir);
FederatedDataset load_dataset(const std::filesystem::path& dir);

}  // namespace fedgraph::datazoo
