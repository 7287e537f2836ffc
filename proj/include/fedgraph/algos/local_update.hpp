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
#include <vector>

#include "fedgraph/common/rng.hpp"
#include "fedgraph/graph/graph.hpp"
#include "fedgraph/nn/model.hpp"

namespace fedgraph::algos {

struct LocalTrainConfig {
  std::uint32_t local_steps = 1;
  double lr = 0.01;
  double weight_decay = 0.0;
  double prox_mu = 0.0;

  void validate() const;
};

// A client's node-level training data with its precomputed operators.
struct LocalData {
  Tensor features;
  nn::GraphOperators ops;
  std::vector<int> labels;
  NodeMasks masks;
};
LocalData make_local_data(const Graph& g);

struct LocalUpdateResult {
  NamedTensorMap params;       // every parameter after training
  std::uint64_t train_count = 0;
  double train_loss = 0.0;     // mean task loss over the steps
};

// Runs `local_steps` full-batch SGD steps on the train mask. When prox_mu > 0
// each step adds prox_mu * (w - global) to the gradient of every weight
// tensor named in `global_snapshot`.
LocalUpdateResult local_update(nn::ParamStore& store, const nn::ModelSpec& spec,
                               const LocalTrainConfig& cfg, const LocalData& data,
                               const NamedTensorMap& global_snapshot, Rng& rng);

// Full-batch gradient of the task loss on the train mask, in eval mode (no
// dropout, no RNG draws). This is the client gradient the monitor compares.
NamedTensorMap local_gradient(const nn::ParamStore& store, const nn::ModelSpec& spec, const LocalData& data);

struct EvalMetrics {
  double loss = 0.0;
  double acc = 0.0;
  std::uint64_t count = 0;
};

// Eval-mode loss and accuracy on one mask; count 0 when the mask is empty.
EvalMetrics evaluate_split(const nn::ModelSpec& spec, const nn::ParamStore& store,
                           const LocalData& data, const std::vector<std::uint8_t>& mask);

}  // namespace fedgraph::algos
