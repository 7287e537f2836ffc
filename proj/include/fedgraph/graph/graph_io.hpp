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

#include <filesystem>
#include <string>

#include "json.hpp"
#include "fedgraph/graph/graph.hpp"

namespace fedgraph {

// JSON graph format, one object per file:
//   {"format_version":1, "directed":false, "num_nodes":N,
//    "edges":[[u,v],...], "edge_weights":[...]?, "features":[[...],...],
//    "labels":[...], "masks":{"train":[ids],"valid":[ids],"test":[ids]},
//    "node_attrs":{"name":[...]}?}
// Undirected files list each edge once and are symmetrized on load. A file
// marked directed:true is accepted only when its edge list is symmetric.
nlohmann::ordered_json graph_to_json(const Graph& g);
Graph graph_from_json(const nlohmann::json& j);

void save_graph(const Graph& g, const std::filesystem::path& path);
Graph load_graph(const std::filesystem::path& path);

// {"format_version":1, "graphs":[graph...], "graph_labels":[...],
//  "graph_props":[...]?}
nlohmann::ordered_json collection_to_json(const GraphCollection& c);
GraphCollection collection_from_json(const nlohmann::json& j);

void save_collection(const GraphCollection& c, const std::filesystem::path& path);
GraphCollection load_collection(const std::filesystem::path& path);

// Reads a whole file; IoError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
// Writes via a temporary file and rename.
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace fedgraph
