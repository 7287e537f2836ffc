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
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fedgraph/common/rng.hpp"
#include "fedgraph/common/tensor.hpp"
#include "fedgraph/graph/graph.hpp"

namespace fedgraph::nn {

enum class GnnKind { kGcn, kSage, kGprgnn };
enum class Readout { kNone, kMean };
enum class Mode { kTrain, kEval };

std::string_view to_string(GnnKind kind);
GnnKind gnn_kind_from_string(std::string_view name);

// A model is an MLP encoder, a GNN body, an optional mean readout and an MLP
// decoder. Every trainable layer but the last is followed by ReLU, and
// dropout is applied to the input of every trainable layer in train mode.
//
// gcn / sage: gnn_dims lists the output width of each message-passing layer.
// gprgnn: the encoder output is propagated k_prop hops and mixed with the
// learnable coefficients "gnn.gamma"; gnn_dims must be empty.
struct ModelSpec {
  std::size_t in_dim = 0;
  std::size_t num_classes = 0;
  std::vector<std::size_t> encoder;
  GnnKind kind = GnnKind::kGcn;
  std::vector<std::size_t> gnn_dims;
  std::size_t k_prop = 10;
  double gpr_alpha = 0.1;
  std::vector<std::size_t> decoder;
  double dropout = 0.0;
  Readout readout = Readout::kNone;

  // Throws ConfigError when layer widths do not chain up to num_classes.
  void validate() const;
};

// Parameters and their gradients. The version counter changes whenever the
// parameters are modified, which lets backward reject stale caches.
class ParamStore {
 public:
  const NamedTensorMap& params() const { return params_; }
  NamedTensorMap& mutable_params() {
    ++version_;
    return params_;
  }
  const NamedTensorMap& grads() const { return grads_; }
  NamedTensorMap& mutable_grads() { return grads_; }
  std::uint64_t version() const { return version_; }

 private:
  NamedTensorMap params_;
  NamedTensorMap grads_;
  std::uint64_t version_ = 0;
};

// Weight tensors are the ones subject to weight decay and the proximal term.
bool is_weight_name(std::string_view name);

// Glorot-uniform weights, zero biases, and PPR-style propagation
// coefficients alpha (1 - alpha)^k with the remainder (1 - alpha)^K last.
ParamStore init_params(const ModelSpec& spec, Rng& rng);

// Precomputed graph operators for one input graph (or a batch of graphs).
struct GraphOperators {
  SparseMatrix norm_adj;  // D^-1/2 (A + I) D^-1/2
  SparseMatrix mean_adj;  // neighbour mean
  std::vector<std::size_t> segment;  // node -> graph, for mean readout
  std::size_t num_segments = 1;
};

GraphOperators make_operators(const Graph& g);
// Disjoint union of a collection, with segment ids for readout.
struct Batch {
  Graph graph;
  GraphOperators ops;
};
Batch make_batch(const GraphCollection& c);

// Per-stage values kept for the backward pass.
struct StageCache {
  Tensor input;           // stage input after dropout
  Tensor dropout_scale;   // 0 or 1/(1-p) per entry; empty without dropout
  Tensor pre_activation;  // empty when the stage has no ReLU
  Tensor neighbor_mean;   // sage: mean_adj * input
  std::vector<Tensor> hops;  // gprgnn: norm_adj^k * input, k = 0..K
};

struct ForwardCache {
  std::uint64_t store_version = 0;
  bool valid = false;
  std::vector<StageCache> stages;
  const GraphOperators* ops = nullptr;
  std::shared_ptr<const GraphOperators> owned_ops;
};

struct ForwardResult {
  Tensor logits;
  ForwardCache cache;
};

// Logits are one row per node, or one row per segment with mean readout.
// `rng` is only drawn from in train mode with dropout > 0.
ForwardResult forward(const ModelSpec& spec, const ParamStore& store, const Tensor& features,
                      const GraphOperators& ops, Mode mode, Rng* rng);

// Convenience form taking the graph and its normalized adjacency.
ForwardResult forward(const ModelSpec& spec, const ParamStore& store, const Graph& g,
                      const SparseMatrix& norm_adj, Mode mode, Rng* rng);

// Writes gradients of every parameter into store.mutable_grads(). Throws
// StaleCache when the parameters changed since the forward pass.
void backward(const ModelSpec& spec, ParamStore& store, const ForwardCache& cache,
              const Tensor& dlogits);

}  // namespace fedgraph::nn
