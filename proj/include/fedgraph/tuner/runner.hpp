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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fedgraph/config/run_config.hpp"
#include "fedgraph/runtime/simulation.hpp"
#include "fedgraph/tuner/sha.hpp"
#include "json.hpp"

namespace fedgraph::tuner {

nlohmann::ordered_json course_config_json(const runtime::CourseConfig& cfg);
std::string course_hash(const runtime::CourseConfig& cfg);

struct RunnerResult {
  // val_acc, test_acc, train_loss, avg_round_seconds
  std::map<std::string, double> metrics;
  std::string checkpoint;
  runtime::RunReport report;
};

// Runs exactly `budget` more rounds, from scratch or from `restore_from`.
// A sample rate sets K = max(1, round(rate * N)). The config hash defaults
// to course_hash of the effective config. Throws RunnerFailure when the
// course diverges (non-finite training loss or validation metric).
RunnerResult runner_call(runtime::CourseConfig cfg, const std::vector<algos::LocalData>& data,
                         std::uint64_t budget, std::optional<double> sample_rate = std::nullopt,
                         std::string_view restore_from = {}, std::string config_hash = {});

// Named categorical dimensions; each grid point is a list of dotted-key
// assignments applied to a base RunConfig. The last dimension varies fastest.
struct SearchSpace {
  std::vector<std::pair<std::string, std::vector<nlohmann::json>>> dims;

  static SearchSpace from_json(const nlohmann::ordered_json& j);
  std::size_t size() const;
  std::vector<std::vector<std::pair<std::string, nlohmann::json>>> grid() const;
};

// Cumulative rounds of the final SHA stage for n candidates.
std::uint64_t sha_horizon(std::size_t n, const ShaConfig& cfg);

struct HpoOptions {
  ShaConfig sha;
  double sample_rate = 1.0;
};

struct HpoResult {
  ShaResult sha;
  std::vector<config::RunConfig> candidates;
};

// SHA over the grid with the FL runner; each candidate continues from its
// own in-memory checkpoint. Every candidate is configured with total_rounds
// equal to the SHA horizon.
HpoResult hpo_run(const config::RunConfig& base, const SearchSpace& space, const datazoo::FederatedDataset& ds,
                  const HpoOptions& opt);

}  // namespace fedgraph::tuner
