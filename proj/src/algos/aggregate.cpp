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

#include "fedgraph/algos/aggregate.hpp"

#include <algorithm>
#include <numeric>

#include "fedgraph/common/error.hpp"

namespace fedgraph::algos {

NamedTensorMap fedavg_aggregate(std::span<const WeightedParams> updates) {
  if (updates.empty()) throw Error(ErrorCode::kEmptyUpdateSet, "nothing to aggregate");
  double total = 0.0;
  for (std::size_t i = 0; i < updates.size(); ++i) {
    if (updates[i].sample_count == 0) {
      throw Error(ErrorCode::kShapeMismatch, "update " + std::to_string(i) + " has sample_count 0");
    }
    if (!congruent(updates[i].params, updates[0].params)) {
      throw Error(ErrorCode::kShapeMismatch,
                  "update " + std::to_string(i) + " is not congruent with update 0");
    }
    total += static_cast<double>(updates[i].sample_count);
  }
  NamedTensorMap out;
  for (const auto& [name, first] : updates[0].params) {
    const double p0 = static_cast<double>(updates[0].sample_count) / total;
    Tensor acc = first;
    for (auto& v : acc.data()) v *= p0;
    for (std::size_t i = 1; i < updates.size(); ++i) {
      const double p = static_cast<double>(updates[i].sample_count) / total;
      const auto& src = updates[i].params.at(name).data();
      auto& dst = acc.data();
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += p * src[j];
    }
    out.emplace(name, std::move(acc));
  }
  return out;
}

std::string_view to_string(AggregatorKind kind) {
  return kind == AggregatorKind::kFedAvg ? "fedavg" : "fedopt";
}

AggregatorKind aggregator_kind_from_string(std::string_view name) {
  if (name == "fedavg") return AggregatorKind::kFedAvg;
  if (name == "fedopt") return AggregatorKind::kFedOpt;
  throw Error(ErrorCode::kConfigError, "unknown aggregator \"" + std::string(name) + "\"");
}

void AggregatorState::validate() const {
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw Error(ErrorCode::kConfigError, "aggregator.momentum must lie in [0, 1)");
  }
  if (!(server_lr > 0.0)) throw Error(ErrorCode::kConfigError, "aggregator.server_lr must be positive");
}

NamedTensorMap fedopt_server_update(AggregatorState& state, const NamedTensorMap& global,
                                    const NamedTensorMap& aggregated) {
  if (!congruent(global, aggregated)) {
    throw Error(ErrorCode::kShapeMismatch, "aggregated params differ from the global model");
  }
  if (state.velocity.empty()) {
    for (const auto& [name, t] : global) state.velocity.emplace(name, Tensor(t.rows(), t.cols()));
  } else if (!congruent(state.velocity, global)) {
    throw Error(ErrorCode::kShapeMismatch, "velocity differs from the global model");
  }
  NamedTensorMap out;
  for (const auto& [name, g] : global) {
    const auto& agg = aggregated.at(name).data();
    auto& v = state.velocity.at(name).data();
    Tensor next = aggregated.at(name);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double delta = agg[i] - g.data()[i];
      v[i] = state.momentum * v[i] + delta;
      // global + lr * v, written as agg + (lr * v - delta) so that lr = 1 and
      // momentum = 0 reproduce the aggregate exactly.
      const double correction = state.server_lr * v[i] - delta;
      if (correction != 0.0) next.data()[i] = agg[i] + correction;
    }
    out.emplace(name, std::move(next));
  }
  return out;
}

NamedTensorMap aggregate(AggregatorState& state, const NamedTensorMap& global,
                         std::span<const WeightedParams> updates) {
  NamedTensorMap avg = fedavg_aggregate(updates);
  if (state.kind == AggregatorKind::kFedAvg) return avg;
  return fedopt_server_update(state, global, avg);
}

std::vector<std::uint32_t> sample_clients(std::uint32_t n, std::uint32_t k, Rng& rng) {
  if (k > n) {
    throw Error(ErrorCode::kKTooLarge, "cannot sample " + std::to_string(k) + " of " + std::to_string(n) + " clients");
  }
  if (k == 0) throw Error(ErrorCode::kKTooLarge, "must sample at least one client");
  std::vector<std::uint32_t> ids(n);
  std::iota(ids.begin(), ids.end(), 1u);
  for (std::uint32_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::uint32_t>(rng.uniform_index(n - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(k);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace fedgraph::algos
