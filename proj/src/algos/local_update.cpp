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

#include "fedgraph/algos/local_update.hpp"

#include "fedgraph/common/error.hpp"
#include "fedgraph/nn/loss.hpp"

namespace fedgraph::algos {

void LocalTrainConfig::validate() const {
  if (local_steps < 1) throw Error(ErrorCode::kConfigError, "train.local_steps must be >= 1");
  if (!(lr >= 0.0)) throw Error(ErrorCode::kConfigError, "train.lr must be >= 0");
  if (!(weight_decay >= 0.0)) throw Error(ErrorCode::kConfigError, "train.weight_decay must be >= 0");
  if (!(prox_mu >= 0.0)) throw Error(ErrorCode::kConfigError, "train.prox_mu must be >= 0");
}

LocalData make_local_data(const Graph& g) {
  LocalData d;
  d.features = g.features;
  d.ops = nn::make_operators(g);
  d.labels = g.labels;
  d.masks = g.masks;
  return d;
}

LocalUpdateResult local_update(nn::ParamStore& store, const nn::ModelSpec& spec,
                               const LocalTrainConfig& cfg, const LocalData& data,
                               const NamedTensorMap& global_snapshot, Rng& rng) {
  LocalUpdateResult result;
  result.train_count = nn::mask_count(data.masks.train);
  if (result.train_count == 0) throw Error(ErrorCode::kEmptyMask, "client has no training nodes");
  for (std::uint32_t step = 0; step < cfg.local_steps; ++step) {
    auto fwd = nn::forward(spec, store, data.features, data.ops, nn::Mode::kTrain, &rng);
    auto loss = nn::masked_softmax_cross_entropy(fwd.logits, data.labels, data.masks.train);
    nn::backward(spec, store, fwd.cache, loss.dlogits);
    result.train_loss += loss.loss;
    if (cfg.prox_mu != 0.0) {
      auto& grads = store.mutable_grads();
      for (const auto& [name, anchor] : global_snapshot) {
        if (!nn::is_weight_name(name)) continue;
        const auto& w = store.params().at(name).data();
        auto& g = grads.at(name).data();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += cfg.prox_mu * (w[i] - anchor.data()[i]);
      }
    }
    nn::sgd_step(store, cfg.lr, cfg.weight_decay);
  }
  result.train_loss /= static_cast<double>(cfg.local_steps);
  result.params = store.params();
  return result;
}

NamedTensorMap local_gradient(const nn::ParamStore& store, const nn::ModelSpec& spec, const LocalData& data) {
  if (nn::mask_count(data.masks.train) == 0) throw Error(ErrorCode::kEmptyMask, "client has no training nodes");
  nn::ParamStore probe;
  probe.mutable_params() = store.params();
  auto fwd = nn::forward(spec, probe, data.features, data.ops, nn::Mode::kEval, nullptr);
  auto loss = nn::masked_softmax_cross_entropy(fwd.logits, data.labels, data.masks.train);
  nn::backward(spec, probe, fwd.cache, loss.dlogits);
  return probe.grads();
}

EvalMetrics evaluate_split(const nn::ModelSpec& spec, const nn::ParamStore& store,
                           const LocalData& data, const std::vector<std::uint8_t>& mask) {
  EvalMetrics m;
  m.count = nn::mask_count(mask);
  if (m.count == 0) return m;
  auto fwd = nn::forward(spec, store, data.features, data.ops, nn::Mode::kEval, nullptr);
  m.loss = nn::masked_softmax_cross_entropy(fwd.logits, data.labels, mask).loss;
  m.acc = nn::accuracy(fwd.logits, data.labels, mask);
  return m;
}

}  // namespace fedgraph::algos
