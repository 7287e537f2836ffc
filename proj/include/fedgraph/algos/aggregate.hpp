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
#include <string_view>
#include <vector>

#include "fedgraph/common/rng.hpp"
#include "fedgraph/common/tensor.hpp"

namespace fedgraph::algos {

struct WeightedParams {
  NamedTensorMap params;
  std::uint64_t sample_count = 0;
};

// Weighted mean with p_i = n_i / sum(n). Updates are summed in the order
// given; callers pass them sorted by sender id.
NamedTensorMap fedavg_aggregate(std::span<const WeightedParams> updates);

enum class AggregatorKind { kFedAvg, kFedOpt };
std::string_view to_string(AggregatorKind kind);
AggregatorKind aggregator_kind_from_string(std::string_view name);

struct AggregatorState {
  AggregatorKind kind = AggregatorKind::kFedAvg;
  double server_lr = 1.0;
  double momentum = 0.9;
  NamedTensorMap velocity;  // empty until the first fedopt step

  void validate() const;
};

// Server SGD with momentum on the pseudo-gradient (aggregated - global):
//   v <- momentum * v + delta;  global <- global + server_lr * v.
NamedTensorMap fedopt_server_update(AggregatorState& state, const NamedTensorMap& global,
                                    const NamedTensorMap& aggregated);

// Applies the configured aggregator to the sorted client updates.
NamedTensorMap aggregate(AggregatorState& state, const NamedTensorMap& global,
                         std::span<const WeightedParams> updates);

// Uniform K-subset of client ids 1..N without replacement, ascending.
std::vector<std::uint32_t> sample_clients(std::uint32_t n, std::uint32_t k, Rng& rng);

}  // namespace fedgraph::algos
