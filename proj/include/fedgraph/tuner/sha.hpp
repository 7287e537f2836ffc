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
#include <functional>
#include <ostream>
#include <vector>

namespace fedgraph::tuner {

struct ShaConfig {
  std::uint32_t eta = 2;
  std::uint64_t base_budget = 1;  // r, in rounds
  std::uint64_t max_budget = 0;   // caps r * eta^s; 0 means no cap
  bool maximize = true;

  void validate() const;
};

struct TrialRow {
  std::size_t config_id = 0;
  std::size_t stage = 0;
  std::uint64_t cum_rounds = 0;
  double metric = 0.0;  // NaN for a failed trial
  bool survived = false;
};

struct ShaResult {
  std::size_t best = 0;
  std::vector<TrialRow> trials;
  std::vector<std::size_t> stage_sizes;     // candidates evaluated per stage
  std::vector<std::uint64_t> stage_budgets;  // cumulative rounds per stage
  std::uint64_t rounds_spent = 0;
};

// Advances candidate `id` to `cum_rounds` total rounds and returns its
// validation metric. Throwing, or returning NaN, marks the trial failed.
using TrialFn = std::function<double(std::size_t id, std::uint64_t cum_rounds)>;

// Successive halving: stage s runs every survivor to r * eta^s cumulative
// rounds, then keeps the best ceil(n_s / eta) (failures last, ties to the
// lower id). The last survivor gets one more stage and is returned.
ShaResult sha_run(std::size_t num_candidates, const TrialFn& trial, const ShaConfig& cfg);

// Columns: config_id, stage, cum_rounds, metric, survived.
void write_trial_csv(std::ostream& out, const ShaResult& r);

}  // namespace fedgraph::tuner
