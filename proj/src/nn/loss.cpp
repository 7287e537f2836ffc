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

#include "fedgraph/nn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedgraph/common/error.hpp"

namespace fedgraph::nn {
namespace {

void check_inputs(const Tensor& logits, std::span<const int> labels,
                  std::span<const std::uint8_t> mask) {
  if (labels.size() != logits.rows() || mask.size() != logits.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "labels/mask length != logit rows");
  }
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= logits.cols()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "label " + std::to_string(labels[i]) + " of row " + std::to_string(i) +
                      " outside [0, " + std::to_string(logits.cols()) + ")");
    }
  }
}

}  // namespace

std::size_t mask_count(std::span<const std::uint8_t> mask) {
  return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](auto m) { return m != 0; }));
}

LossResult masked_softmax_cross_entropy(const Tensor& logits, std::span<const int> labels,
                                        std::span<const std::uint8_t> mask) {
  const std::size_t m = mask_count(mask);
  if (m == 0) throw Error(ErrorCode::kEmptyMask, "loss over an empty mask");
  check_inputs(logits, labels, mask);
  LossResult out;
  out.dlogits = Tensor(logits.rows(), logits.cols());
  const double inv = 1.0 / static_cast<double>(m);
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    if (!mask[i]) continue;
    auto z = logits.row(i);
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - zmax);
    const double log_sum = std::log(sum);
    const auto y = static_cast<std::size_t>(labels[i]);
    out.loss += -(z[y] - zmax - log_sum);
    auto d = out.dlogits.row(i);
    for (std::size_t c = 0; c < z.size(); ++c) {
      const double p = std::exp(z[c] - zmax - log_sum);
      d[c] = (p - (c == y ? 1.0 : 0.0)) * inv;
    }
  }
  out.loss *= inv;
  return out;
}

double accuracy(const Tensor& logits, std::span<const int> labels,
                std::span<const std::uint8_t> mask) {
  const std::size_t m = mask_count(mask);
  if (m == 0) throw Error(ErrorCode::kEmptyMask, "accuracy over an empty mask");
  check_inputs(logits, labels, mask);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    if (!mask[i]) continue;
    auto z = logits.row(i);
    const auto arg = static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
    if (arg == static_cast<std::size_t>(labels[i])) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(m);
}

void sgd_step(ParamStore& store, double lr, double weight_decay) {
  const auto& grads = store.grads();
  for (const auto& [name, w] : store.params()) {
    auto it = grads.find(name);
    if (it == grads.end() || !it->second.same_shape(w)) {
      throw Error(ErrorCode::kMissingGrads, "no gradient for \"" + name + "\"");
    }
  }
  auto& params = store.mutable_params();
  for (auto& [name, w] : params) {
    const auto& g = grads.at(name).data();
    auto& x = w.data();
    const bool decay = weight_decay != 0.0 && is_weight_name(name);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double step = decay ? g[i] + weight_decay * x[i] : g[i];
      x[i] -= lr * step;
    }
  }
}

}  // namespace fedgraph::nn
