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

#include "fedgraph/datazoo/csbm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fedgraph/common/error.hpp"
#include "fedgraph/common/hash.hpp"
#include "fedgraph/common/rng.hpp"
#include "fedgraph/datazoo/splitters.hpp"

namespace fedgraph::datazoo {

double csbm_lambda(double lambda_max, double phi) {
  return lambda_max * std::sin(phi * std::numbers::pi / 2.0);
}

double CsbmParams::resolved_lambda_max() const {
  if (lambda_max >= 0.0) return lambda_max;
  const double n = static_cast<double>(nodes_per_client);
  const double d = avg_degree;
  const double fallback = 0.9 * std::sqrt(d) * (1.0 - d / n);
  return std::clamp(fallback, 0.0, std::min((n - d) / std::sqrt(d), std::sqrt(d)));
}

void CsbmParams::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::kInvalidParams, what); };
  if (nodes_per_client < 2) bad("nodes_per_client must be >= 2");
  if (feature_dim < 1) bad("feature_dim must be >= 1");
  if (!(avg_degree >= 1.0)) bad("avg_degree must be >= 1");
  if (!(mu >= 0.0)) bad("mu must be >= 0");
  if (phi_per_client.empty()) bad("phi_per_client is empty");
  for (double phi : phi_per_client) {
    if (!(phi >= 0.0 && phi <= 1.0)) bad("phi outside [0, 1]");
  }
  if (!(train_ratio >= 0.0 && valid_ratio >= 0.0 && train_ratio + valid_ratio <= 1.0)) {
    bad("mask ratios must be non-negative and sum to at most 1");
  }
  const double n = static_cast<double>(nodes_per_client);
  const double lam = resolved_lambda_max();
  const double p_in = (avg_degree + lam * std::sqrt(avg_degree)) / n;
  const double p_out = (avg_degree - lam * std::sqrt(avg_degree)) / n;
  if (p_in > 1.0 || p_out < 0.0) {
    bad("edge probability out of [0, 1] (p_in=" + std::to_string(p_in) +
        ", p_out=" + std::to_string(p_out) + ")");
  }
}

nlohmann::ordered_json CsbmParams::to_json() const {
  nlohmann::ordered_json j;
  j["nodes_per_client"] = nodes_per_client;
  j["feature_dim"] = feature_dim;
  j["avg_degree"] = avg_degree;
  j["mu"] = mu;
  j["phi"] = phi_per_client;
  j["lambda_max"] = resolved_lambda_max();
  j["train_ratio"] = train_ratio;
  j["valid_ratio"] = valid_ratio;
  return j;
}

FederatedDataset fedcsbm_generate(const CsbmParams& params) {
  params.validate();
  const std::size_t n = params.nodes_per_client;
  const std::size_t p = params.feature_dim;
  const double d = params.avg_degree;
  const double lambda_max = params.resolved_lambda_max();

  Rng shared(params.seed, 0);
  std::vector<double> u(p);
  for (auto& x : u) x = shared.normal() / std::sqrt(static_cast<double>(p));

  FederatedDataset ds;
  ds.manifest.splitter = "fedcsbm";
  ds.manifest.config = params.to_json();
  ds.manifest.seed = params.seed;
  ds.manifest.num_clients = params.phi_per_client.size();
  ds.manifest.source_sha256 = sha256_hex(ds.manifest.config.dump());

  const double signal = std::sqrt(params.mu / static_cast<double>(n));
  const double noise = 1.0 / std::sqrt(static_cast<double>(p));
  for (std::size_t c = 0; c < params.phi_per_client.size(); ++c) {
    Rng rng(params.seed, c + 1);
    const double lambda = csbm_lambda(lambda_max, params.phi_per_client[c]);
    const double p_in = (d + lambda * std::sqrt(d)) / static_cast<double>(n);
    const double p_out = (d - lambda * std::sqrt(d)) / static_cast<double>(n);

    std::vector<int> labels(n);
    for (auto& y : labels) y = rng.bernoulli(0.5) ? 1 : 0;
    Tensor x(n, p);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = labels[i] == 1 ? 1.0 : -1.0;
      for (std::size_t k = 0; k < p; ++k) x(i, k) = signal * v * u[k] + noise * rng.normal();
    }
    std::vector<Edge> edges;
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = i + 1; j < n; ++j) {
        const double prob = labels[i] == labels[j] ? p_in : p_out;
        if (rng.uniform() < prob) edges.emplace_back(i, j);
      }
    }
    NodeMasks masks = stratified_masks(labels, params.train_ratio, params.valid_ratio, rng);
    ds.graphs.push_back(build_graph(edges, n, std::move(x), std::move(labels), std::move(masks)));
    std::vector<NodeId> ids(n);
    for (NodeId i = 0; i < n; ++i) ids[i] = i;
    ds.source_ids.push_back(std::move(ids));
  }
  return ds;
}

}  // namespace fedgraph::datazoo
