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

#include "fedgraph/datazoo/dataset.hpp"

#include "fedgraph/common/error.hpp"
#include "fedgraph/common/hash.hpp"
#include "fedgraph/graph/graph_io.hpp"

namespace fedgraph::datazoo {

nlohmann::ordered_json Manifest::to_json() const {
  nlohmann::ordered_json j;
  j["splitter"] = splitter;
  j["config"] = config;
  j["seed"] = seed;
  j["num_clients"] = num_clients;
  j["source_sha256"] = source_sha256;
  return j;
}

Manifest Manifest::from_json(const nlohmann::ordered_json& j) {
  try {
    Manifest m;
    m.splitter = j.at("splitter").get<std::string>();
    m.config = j.at("config");
    m.seed = j.at("seed").get<std::uint64_t>();
    m.num_clients = j.at("num_clients").get<std::size_t>();
    m.source_sha256 = j.at("source_sha256").get<std::string>();
    if (m.num_clients < 1) throw Error(ErrorCode::kInvariantViolation, "num_clients < 1");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("manifest: ") + e.what());
  }
}

std::string fingerprint(const Graph& g) { return sha256_hex(graph_to_json(g).dump()); }

std::string fingerprint(const GraphCollection& c) {
  return sha256_hex(collection_to_json(c).dump());
}

void save_dataset(const FederatedDataset& ds, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "manifest.json", ds.manifest.to_json().dump(2) + "\n");
  for (std::size_t i = 0; i < ds.num_clients(); ++i) {
    auto path = dir / ("client_" + std::to_string(i) + ".json");
    if (ds.graph_level()) {
      save_collection(ds.collections[i], path);
    } else {
      save_graph(ds.graphs[i], path);
    }
  }
}

FederatedDataset load_dataset(const std::filesystem::path& dir) {
  FederatedDataset ds;
  const auto text = read_file(dir / "manifest.json");
  try {
    ds.manifest = Manifest::from_json(nlohmann::ordered_json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, "manifest.json: " + std::string(e.what()));
  }
  for (std::size_t i = 0; i < ds.manifest.num_clients; ++i) {
    auto path = dir / ("client_" + std::to_string(i) + ".json");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
    }
    if (j.contains("graphs")) {
      ds.collections.push_back(collection_from_json(j));
    } else {
      ds.graphs.push_back(graph_from_json(j));
    }
  }
  if (!ds.graphs.empty() && !ds.collections.empty()) {
    throw Error(ErrorCode::kInvariantViolation, "dataset mixes node- and graph-level clients");
  }
  return ds;
}

}  // namespace fedgraph::datazoo
