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

#include "fedgraph/nn/model.hpp"

#include <algorithm>
#include <cmath>

#include "fedgraph/common/error.hpp"
#include "fedgraph/nn/ops.hpp"

namespace fedgraph::nn {
namespace {

enum class StageKind { kLinear, kGcn, kSage, kPropagate, kReadout };

struct Stage {
  StageKind kind;
  std::string prefix;
  std::size_t in = 0;
  std::size_t out = 0;
  bool relu = false;

  bool trainable_layer() const {
    return kind == StageKind::kLinear || kind == StageKind::kGcn || kind == StageKind::kSage;
  }
};

std::vector<Stage> plan(const ModelSpec& spec) {
  std::vector<Stage> stages;
  std::size_t dim = spec.in_dim;
  auto push = [&](StageKind kind, std::string prefix, std::size_t out) {
    stages.push_back({kind, std::move(prefix), dim, out, false});
    dim = out;
  };
  for (std::size_t i = 0; i < spec.encoder.size(); ++i) {
    push(StageKind::kLinear, "encoder." + std::to_string(i), spec.encoder[i]);
  }
  if (spec.kind == GnnKind::kGprgnn) {
    push(StageKind::kPropagate, "gnn", dim);
  } else {
    for (std::size_t i = 0; i < spec.gnn_dims.size(); ++i) {
      push(spec.kind == GnnKind::kGcn ? StageKind::kGcn : StageKind::kSage,
           "gnn." + std::to_string(i), spec.gnn_dims[i]);
    }
  }
  if (spec.readout == Readout::kMean) push(StageKind::kReadout, "readout", dim);
  for (std::size_t i = 0; i < spec.decoder.size(); ++i) {
    push(StageKind::kLinear, "decoder." + std::to_string(i), spec.decoder[i]);
  }
  auto last = std::find_if(stages.rbegin(), stages.rend(),
                           [](const Stage& s) { return s.trainable_layer(); });
  for (auto it = stages.begin(); it != stages.end(); ++it) {
    it->relu = it->trainable_layer() && (last == stages.rend() || &*it != &*last);
  }
  return stages;
}

const Tensor& param(const ParamStore& store, const std::string& name) {
  auto it = store.params().find(name);
  if (it == store.params().end()) {
    throw Error(ErrorCode::kShapeMismatch, "missing parameter \"" + name + "\"");
  }
  return it->second;
}

Tensor glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor w(fan_in, fan_out);
  for (auto& v : w.data()) v = (2.0 * rng.uniform() - 1.0) * bound;
  return w;
}

void relu_inplace(Tensor& x) {
  for (auto& v : x.data()) v = v > 0.0 ? v : 0.0;
}

void relu_backward(Tensor& grad, const Tensor& pre) {
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!(pre.data()[i] > 0.0)) grad.data()[i] = 0.0;
  }
}

void hadamard_inplace(Tensor& x, const Tensor& y) {
  for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] *= y.data()[i];
}

}  // namespace

std::string_view to_string(GnnKind kind) {
  switch (kind) {
    case GnnKind::kGcn: return "gcn";
    case GnnKind::kSage: return "sage";
    case GnnKind::kGprgnn: return "gprgnn";
  }
  return "?";
}

GnnKind gnn_kind_from_string(std::string_view name) {
  if (name == "gcn") return GnnKind::kGcn;
  if (name == "sage") return GnnKind::kSage;
  if (name == "gprgnn") return GnnKind::kGprgnn;
  throw Error(ErrorCode::kConfigError, "unknown gnn kind \"" + std::string(name) + "\"");
}

void ModelSpec::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::kConfigError, "model: " + what); };
  if (in_dim == 0) bad("in_dim must be positive");
  if (num_classes == 0) bad("num_classes must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) bad("dropout must lie in [0, 1)");
  for (auto dims : {&encoder, &gnn_dims, &decoder}) {
    for (std::size_t d : *dims) {
      if (d == 0) bad("layer width 0");
    }
  }
  if (kind == GnnKind::kGprgnn) {
    if (!gnn_dims.empty()) bad("gprgnn takes no gnn_dims; use encoder/decoder");
    if (k_prop < 1) bad("gprgnn needs k_prop >= 1");
    if (!(gpr_alpha > 0.0 && gpr_alpha < 1.0)) bad("gpr_alpha must lie in (0, 1)");
  } else if (gnn_dims.empty()) {
    bad("gcn/sage need at least one gnn layer");
  }
  auto stages = plan(*this);
  if (std::none_of(stages.begin(), stages.end(), [](const Stage& s) { return s.trainable_layer(); })) {
    bad("no trainable layer");
  }
  const std::size_t out = stages.back().out;
  if (out != num_classes) {
    bad("output width " + std::to_string(out) + " != num_classes " + std::to_string(num_classes));
  }
}

bool is_weight_name(std::string_view name) {
  auto dot_pos = name.rfind('.');
  auto leaf = dot_pos == std::string_view::npos ? name : name.substr(dot_pos + 1);
  return leaf.starts_with("weight");
}

ParamStore init_params(const ModelSpec& spec, Rng& rng) {
  spec.validate();
  ParamStore store;
  auto& params = store.mutable_params();
  for (const auto& s : plan(spec)) {
    switch (s.kind) {
      case StageKind::kLinear:
      case StageKind::kGcn:
        params[s.prefix + ".weight"] = glorot(s.in, s.out, rng);
        params[s.prefix + ".bias"] = Tensor(1, s.out);
        break;
      case StageKind::kSage:
        params[s.prefix + ".weight_self"] = glorot(s.in, s.out, rng);
        params[s.prefix + ".weight_neigh"] = glorot(s.in, s.out, rng);
        params[s.prefix + ".bias"] = Tensor(1, s.out);
        break;
      case StageKind::kPropagate: {
        Tensor gamma(1, spec.k_prop + 1);
        for (std::size_t k = 0; k < spec.k_prop; ++k) {
          gamma(0, k) = spec.gpr_alpha * std::pow(1.0 - spec.gpr_alpha, static_cast<double>(k));
        }
        gamma(0, spec.k_prop) = std::pow(1.0 - spec.gpr_alpha, static_cast<double>(spec.k_prop));
        params[s.prefix + ".gamma"] = std::move(gamma);
        break;
      }
      case StageKind::kReadout:
        break;
    }
  }
  return store;
}

GraphOperators make_operators(const Graph& g) {
  GraphOperators ops;
  ops.norm_adj = sym_normalized_adjacency(g, true);
  ops.mean_adj = mean_adjacency(g);
  ops.segment.assign(g.num_nodes, 0);
  ops.num_segments = 1;
  return ops;
}

Batch make_batch(const GraphCollection& c) {
  std::vector<Edge> edges;
  std::size_t n = 0;
  std::size_t dim = c.graphs.empty() ? 0 : c.graphs[0].features.cols();
  for (const auto& g : c.graphs) {
    if (g.features.cols() != dim) throw Error(ErrorCode::kShapeMismatch, "feature widths differ in batch");
    for (auto [u, v] : g.edge_list()) {
      edges.emplace_back(static_cast<NodeId>(u + n), static_cast<NodeId>(v + n));
    }
    n += g.num_nodes;
  }
  Tensor x(n, dim);
  std::vector<std::size_t> segment(n);
  std::size_t offset = 0;
  for (std::size_t gi = 0; gi < c.graphs.size(); ++gi) {
    const auto& g = c.graphs[gi];
    std::copy(g.features.data().begin(), g.features.data().end(),
              x.data().begin() + static_cast<std::ptrdiff_t>(offset * dim));
    for (std::size_t i = 0; i < g.num_nodes; ++i) segment[offset + i] = gi;
    offset += g.num_nodes;
  }
  Batch batch;
  batch.graph = build_graph(edges, n, std::move(x));
  batch.ops = make_operators(batch.graph);
  batch.ops.segment = std::move(segment);
  batch.ops.num_segments = c.graphs.size();
  return batch;
}

ForwardResult forward(const ModelSpec& spec, const ParamStore& store, const Tensor& features,
                      const GraphOperators& ops, Mode mode, Rng* rng) {
  if (features.cols() != spec.in_dim) {
    throw Error(ErrorCode::kShapeMismatch, "feature width " + std::to_string(features.cols()) +
                                               " != model in_dim " + std::to_string(spec.in_dim));
  }
  if (ops.norm_adj.rows != features.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "adjacency size != feature rows");
  }
  const bool use_dropout = mode == Mode::kTrain && spec.dropout > 0.0;
  if (use_dropout && rng == nullptr) {
    throw Error(ErrorCode::kConfigError, "train-mode dropout needs an rng");
  }
  const auto stages = plan(spec);
  ForwardResult result;
  result.cache.store_version = store.version();
  result.cache.ops = &ops;
  result.cache.stages.resize(stages.size());

  Tensor h = features;
  for (std::size_t si = 0; si < stages.size(); ++si) {
    const Stage& s = stages[si];
    StageCache& sc = result.cache.stages[si];
    if (s.trainable_layer()) {
      if (use_dropout) {
        const double keep_scale = 1.0 / (1.0 - spec.dropout);
        sc.dropout_scale = Tensor(h.rows(), h.cols());
        for (std::size_t i = 0; i < h.size(); ++i) {
          const double m = rng->uniform() < spec.dropout ? 0.0 : keep_scale;
          sc.dropout_scale.data()[i] = m;
          h.data()[i] *= m;
        }
      }
      Tensor y;
      if (s.kind == StageKind::kLinear) {
        y = matmul(h, param(store, s.prefix + ".weight"));
      } else if (s.kind == StageKind::kGcn) {
        y = spmm(ops.norm_adj, matmul(h, param(store, s.prefix + ".weight")));
      } else {
        sc.neighbor_mean = spmm(ops.mean_adj, h);
        y = matmul(h, param(store, s.prefix + ".weight_self"));
        add_inplace(y, matmul(sc.neighbor_mean, param(store, s.prefix + ".weight_neigh")));
      }
      add_row_vector(y, param(store, s.prefix + ".bias"));
      sc.input = std::move(h);
      if (s.relu) {
        sc.pre_activation = y;
        relu_inplace(y);
      }
      h = std::move(y);
    } else if (s.kind == StageKind::kPropagate) {
      const Tensor& gamma = param(store, s.prefix + ".gamma");
      if (gamma.rows() != 1 || gamma.cols() != spec.k_prop + 1) {
        throw Error(ErrorCode::kShapeMismatch, "gnn.gamma must be 1 x (k_prop + 1)");
      }
      sc.hops.reserve(spec.k_prop + 1);
      sc.hops.push_back(std::move(h));
      for (std::size_t k = 1; k <= spec.k_prop; ++k) sc.hops.push_back(spmm(ops.norm_adj, sc.hops.back()));
      Tensor z(sc.hops[0].rows(), sc.hops[0].cols());
      for (std::size_t k = 0; k <= spec.k_prop; ++k) axpy(z, gamma(0, k), sc.hops[k]);
      h = std::move(z);
    } else {
      if (ops.segment.size() != h.rows()) throw Error(ErrorCode::kShapeMismatch, "segment ids != node count");
      Tensor pooled(ops.num_segments, h.cols());
      std::vector<double> count(ops.num_segments, 0.0);
      for (std::size_t i = 0; i < h.rows(); ++i) {
        const std::size_t g = ops.segment[i];
        count[g] += 1.0;
        auto dst = pooled.row(g);
        auto src = h.row(i);
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
      }
      for (std::size_t g = 0; g < ops.num_segments; ++g) {
        if (count[g] == 0.0) continue;
        for (auto& v : pooled.row(g)) v /= count[g];
      }
      h = std::move(pooled);
    }
  }
  result.logits = std::move(h);
  result.cache.valid = true;
  return result;
}

ForwardResult forward(const ModelSpec& spec, const ParamStore& store, const Graph& g,
                      const SparseMatrix& norm_adj, Mode mode, Rng* rng) {
  auto ops = std::make_shared<GraphOperators>();
  ops->norm_adj = norm_adj;
  ops->mean_adj = mean_adjacency(g);
  ops->segment.assign(g.num_nodes, 0);
  auto result = forward(spec, store, g.features, *ops, mode, rng);
  result.cache.owned_ops = std::move(ops);
  return result;
}

void backward(const ModelSpec& spec, ParamStore& store, const ForwardCache& cache,
              const Tensor& dlogits) {
  if (!cache.valid || cache.ops == nullptr) throw Error(ErrorCode::kStaleCache, "no forward pass recorded");
  if (cache.store_version != store.version()) {
    throw Error(ErrorCode::kStaleCache, "parameters changed since the forward pass");
  }
  const auto stages = plan(spec);
  if (stages.size() != cache.stages.size()) throw Error(ErrorCode::kStaleCache, "cache from another model");
  const GraphOperators& ops = *cache.ops;

  NamedTensorMap grads;
  Tensor dh = dlogits;
  for (std::size_t si = stages.size(); si-- > 0;) {
    const Stage& s = stages[si];
    const StageCache& sc = cache.stages[si];
    const bool need_input_grad = si > 0;
    if (s.trainable_layer()) {
      Tensor dy = std::move(dh);
      if (s.relu) relu_backward(dy, sc.pre_activation);
      grads[s.prefix + ".bias"] = column_sums(dy);
      Tensor dx;
      if (s.kind == StageKind::kLinear) {
        const Tensor& w = param(store, s.prefix + ".weight");
        grads[s.prefix + ".weight"] = matmul_tn(sc.input, dy);
        if (need_input_grad) dx = matmul_nt(dy, w);
      } else if (s.kind == StageKind::kGcn) {
        const Tensor& w = param(store, s.prefix + ".weight");
        Tensor dp = spmm_transposed(ops.norm_adj, dy);
        grads[s.prefix + ".weight"] = matmul_tn(sc.input, dp);
        if (need_input_grad) dx = matmul_nt(dp, w);
      } else {
        const Tensor& ws = param(store, s.prefix + ".weight_self");
        const Tensor& wn = param(store, s.prefix + ".weight_neigh");
        grads[s.prefix + ".weight_self"] = matmul_tn(sc.input, dy);
        grads[s.prefix + ".weight_neigh"] = matmul_tn(sc.neighbor_mean, dy);
        if (need_input_grad) {
          dx = matmul_nt(dy, ws);
          add_inplace(dx, spmm_transposed(ops.mean_adj, matmul_nt(dy, wn)));
        }
      }
      if (need_input_grad && !sc.dropout_scale.empty()) hadamard_inplace(dx, sc.dropout_scale);
      dh = std::move(dx);
    } else if (s.kind == StageKind::kPropagate) {
      const Tensor& gamma = param(store, s.prefix + ".gamma");
      Tensor dgamma(1, spec.k_prop + 1);
      for (std::size_t k = 0; k <= spec.k_prop; ++k) dgamma(0, k) = dot(sc.hops[k], dh);
      grads[s.prefix + ".gamma"] = std::move(dgamma);
      if (need_input_grad) {
        // dH0 = sum_k gamma_k (A^T)^k dZ, accumulated Horner-style.
        Tensor acc = dh;
        scale_inplace(acc, gamma(0, spec.k_prop));
        for (std::size_t k = spec.k_prop; k-- > 0;) {
          acc = spmm_transposed(ops.norm_adj, acc);
          axpy(acc, gamma(0, k), dh);
        }
        dh = std::move(acc);
      }
    } else {
      std::vector<double> count(ops.num_segments, 0.0);
      for (std::size_t seg : ops.segment) count[seg] += 1.0;
      Tensor dx(ops.segment.size(), dh.cols());
      for (std::size_t i = 0; i < dx.rows(); ++i) {
        const std::size_t g = ops.segment[i];
        auto dst = dx.row(i);
        auto src = dh.row(g);
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = src[j] / count[g];
      }
      dh = std::move(dx);
    }
  }
  store.mutable_grads() = std::move(grads);
}

}  // namespace fedgraph::nn
