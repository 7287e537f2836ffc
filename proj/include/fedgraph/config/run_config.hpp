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
#include <optional>
#include <string>
#include <vector>

#include "fedgraph/datazoo/csbm.hpp"
#include "fedgraph/datazoo/dataset.hpp"
#include "fedgraph/runtime/course.hpp"
#include "json.hpp"

namespace fedgraph::config {

// A run configuration file. Sections:
//   data            {"path": dir} or {"csbm": {...}}
//   model           kind, hidden, num_layers, k_prop, alpha, dropout, encoder, decoder
//   federation      clients_per_round (0: derive from sample_rate), sample_rate,
//                   total_rounds, eval_every
//   train           local_steps, lr, weight_decay, prox_mu
//   aggregator      kind, server_lr, momentum
//   personalization list of "pattern->shared|local"
//   monitor         enabled, log_dir
//   output          dir
//   seed
class RunConfig {
 public:
  // Fills defaults, rejects unknown keys and wrongly typed values.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
  static const nlohmann::json& defaults();

  // Applies "dotted.path=value"; the value is parsed as JSON, or taken as a
  // string when it is not valid JSON. Revalidates the whole tree.
  void set(const std::string& assignment);

  const nlohmann::json& tree() const { return tree_; }
  // SHA-256 over the sections that determine a course's trajectory
  // (everything except monitor and output).
  std::string hash() const;

  datazoo::FederatedDataset load_data() const;
  // Model dimensions come from the dataset.
  runtime::CourseConfig course(const datazoo::FederatedDataset& ds) const;
  runtime::CourseConfig course(std::size_t in_dim, std::size_t num_classes, std::uint32_t num_clients) const;

  std::uint64_t seed() const { return tree_.at("seed").get<std::uint64_t>(); }
  bool monitor_enabled() const { return tree_.at("monitor").at("enabled").get<bool>(); }
  std::filesystem::path log_dir() const;
  std::filesystem::path output_dir() const;

 private:
  nlohmann::json tree_;
};

// K = max(1, round(rate * N)).
std::uint32_t clients_for_rate(double rate, std::uint32_t n);

// Feature width and class count of a node-level dataset.
std::pair<std::size_t, std::size_t> dataset_dims(const datazoo::FederatedDataset& ds);

datazoo::CsbmParams csbm_from_json(const nlohmann::json& j);

}  // namespace fedgraph::config
