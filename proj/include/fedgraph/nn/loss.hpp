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

#include "fedgraph/common/tensor.hpp"
#include "fedgraph/nn/model.hpp"

namespace fedgraph::nn {

struct LossResult {
  double loss = 0.0;
  Tensor dlogits;
};

// Mean cross-entropy over rows with mask[i] != 0. The gradient is
// (softmax - onehot) / |mask| on masked rows and zero elsewhere.
LossResult masked_softmax_cross_entropy(const Tensor& logits, std::span<const int> labels,
                                        std::span<const std::uint8_t> mask);

// Fraction of masked rows whose argmax (lowest index on ties) equals the label.
double accuracy(const Tensor& logits, std::span<const int> labels,
                std::span<const std::uint8_t> mask);

std::size_t mask_count(std::span<const std::uint8_t> mask);

// w <- w - lr * (grad + weight_decay * w); weight decay only on weight tensors.
void sgd_step(ParamStore& store, double lr, double weight_decay);

}  // namespace fedgraph::nn
