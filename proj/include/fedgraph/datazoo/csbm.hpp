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

#include "fedgraph/datazoo/dataset.hpp"

namespace fedgraph::datazoo {

// Contextual SBM parameters for a federation of generated graphs. All
// clients share one feature direction, so their node features follow the
// same distribution; each client's structural signal depends on its phi.
struct CsbmParams {
  std::size_t nodes_per_client = 250;  // n
  std::size_t feature_dim = 16;        // p
  double avg_degree = 10.0;            // d
  double mu = 1.0;                     // feature signal strength
  std::vector<double> phi_per_client;  // one phi in [0, 1] per client
  // Structural signal cap; negative selects 0.9 * sqrt(d) * (1 - d/n),
  // clipped so both edge probabilities stay in [0, 1].
  double lambda_max = -1.0;
  std::uint64_t seed = 0;
  double train_ratio = 0.6;
  double valid_ratio = 0.2;

  double resolved_lambda_max() const;
  // Throws InvalidParams.
  void validate() const;
  nlohmann::ordered_json to_json() const;
};

// lambda_c = lambda_max * sin(phi_c * pi / 2).
double csbm_lambda(double lambda_max, double phi);

// Per-client graphs: labels v_i in {0, 1} uniform, features
// x_i = sqrt(mu/n) * (2v_i - 1) * u + z_i / sqrt(p) with u ~ N(0, I/p) shared,
// edges independent with probability (d + lambda sqrt(d))/n within a
// community and (d - lambda sqrt(d))/n across.
FederatedDataset fedcsbm_generate(const CsbmParams& params);

}  // namespace fedgraph::datazoo
