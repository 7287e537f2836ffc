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

#include <cmath>
#include <map>

#include "doctest.h"
#include "fedgraph/algos/aggregate.hpp"
#include "fedgraph/algos/local_update.hpp"
#include "fedgraph/algos/personalization.hpp"
#include "fedgraph/common/error.hpp"
#include "fedgraph/nn/loss.hpp"
#include "support/gradcheck.hpp"

using namespace fedgraph;
using namespace fedgraph::algos;

namespace {

NamedTensorMap one(std::vector<double> w) {
  const std::size_t n = w.size();
  return {{"w", Tensor(1, n, std::move(w))}};
}

double norm_diff(const NamedTensorMap& a, const NamedTensorMap& b) {
  double s = 0.0;
  for (const auto& [name, t] : a) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double d = t.data()[i] - b.at(name).data()[i];
      s += d * d;
    }
  }
  return std::sqrt(s);
}

struct Fixture {
  nn::ModelSpec spec;
  Graph graph;
  LocalData data;
  nn::ParamStore store;

  explicit Fixture(std::uint64_t seed) {
    Rng rng(seed);
    graph = fedgraph::testing::random_node_graph(rng, 15, 4, 3);
    for (std::size_t i = 0; i < 15; ++i) graph.masks.train[i] = i % 3 != 0;
    data = make_local_data(graph);
    spec.in_dim = 4;
    spec.num_classes = 3;
    spec.gnn_dims = {6, 3};
    spec.dropout = 0.3;
    store = nn::init_params(spec, rng);
  }
};

}  // namespace

TEST_CASE("fedavg") {
  std::vector<WeightedParams> eq{{one({1, 3}), 1}, {one({3, 5}), 1}};
  CHECK(fedavg_aggregate(eq).at("w") == Tensor(1, 2, {2, 4}));
  std::vector<WeightedParams> weighted{{one({4}), 1}, {one({0}), 3}};
  CHECK(fedavg_aggregate(weighted).at("w")(0, 0) == 1.0);
  std::vector<WeightedParams> single{{one({-0.0, 7.25}), 5}};
  CHECK(bitwise_equal(fedavg_aggregate(single), single[0].params));
  CHECK_THROWS_AS(fedavg_aggregate({}), Error);
  std::vector<WeightedParams> bad{{one({1}), 1}, {one({1, 2}), 1}};
  CHECK_THROWS_AS(fedavg_aggregate(bad), Error);
  std::vector<WeightedParams> ones{{one({1}), 3}, {one({1}), 7}, {one({1}), 11}};
  CHECK(std::abs(fedavg_aggregate(ones).at("w")(0, 0) - 1.0) < 1e-12);
}

TEST_CASE("fedopt") {
  AggregatorState st{AggregatorKind::kFedOpt, 0.5, 0.0, {}};
  CHECK(fedopt_server_update(st, one({0}), one({2})).at("w")(0, 0) == 1.0);

  AggregatorState zero{AggregatorKind::kFedOpt, 1.0, 0.9, {}};
  auto g = one({1.5, -2.0});
  CHECK(bitwise_equal(fedopt_server_update(zero, g, g), g));

  SUBCASE("momentum accumulates") {
    AggregatorState m{AggregatorKind::kFedOpt, 1.0, 0.5, {}};
    auto first = fedopt_server_update(m, one({0}), one({1}));
    CHECK(first.at("w")(0, 0) == 1.0);
    auto second = fedopt_server_update(m, first, one({2}));
    CHECK(second.at("w")(0, 0) == doctest::Approx(2.5));
  }
  SUBCASE("server_lr 1, momentum 0 equals fedavg exactly") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<WeightedParams> ups;
      NamedTensorMap global;
      global["a"] = Tensor(3, 2);
      global["b"] = Tensor(1, 4);
      for (auto& [_, t] : global) for (auto& v : t.data()) v = rng.normal();
      for (int c = 0; c < 4; ++c) {
        WeightedParams u{global, 1 + rng.uniform_index(50)};
        for (auto& [_, t] : u.params) for (auto& v : t.data()) v += rng.normal() * 1e-3;
        ups.push_back(std::move(u));
      }
      AggregatorState opt{AggregatorKind::kFedOpt, 1.0, 0.0, {}};
      CHECK(bitwise_equal(aggregate(opt, global, ups), fedavg_aggregate(ups)));
    }
  }
  AggregatorState bad{AggregatorKind::kFedOpt, 1.0, 1.0, {}};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("split_shared_local") {
  NamedTensorMap p{{"encoder.0.weight", Tensor(2, 2)}, {"encoder.0.bias", Tensor(1, 2)},
                   {"gnn.gamma", Tensor(1, 3)}, {"decoder.0.weight", Tensor(2, 2)}};
  auto all = split_shared_local(p, PersonalizationSpec{});
  CHECK(all.local.empty());
  CHECK(all.shared.size() == 4);

  auto gpr = split_shared_local(p, PersonalizationSpec::parse({"gnn.gamma*->local", "*->shared"}));
  CHECK(gpr.local.size() == 1);
  CHECK(gpr.local.count("gnn.gamma") == 1);
  CHECK(gpr.shared.size() == 3);

  NamedTensorMap a{{"a1", Tensor(1, 1)}};
  auto first = split_shared_local(a, PersonalizationSpec::parse({"a*->local", "a*->shared"}));
  CHECK(first.local.count("a1") == 1);

  CHECK_THROWS_AS(split_shared_local(p, PersonalizationSpec::parse({"enc*->local"})), Error);
  CHECK_THROWS_AS(PersonalizationSpec::parse({"*->maybe"}), Error);
}

TEST_CASE("sample_clients") {
  Rng rng(1);
  CHECK(sample_clients(5, 5, rng) == std::vector<std::uint32_t>{1, 2, 3, 4, 5});
  CHECK(sample_clients(1, 1, rng) == std::vector<std::uint32_t>{1});
  CHECK_THROWS_AS(sample_clients(3, 4, rng), Error);

  SUBCASE("uniform over 3-subsets of 10") {
    std::map<std::vector<std::uint32_t>, int> counts;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) ++counts[sample_clients(10, 3, rng)];
    REQUIRE(counts.size() == 120);
    const double expected = draws / 120.0;
    double chi2 = 0.0;
    for (const auto& [_, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
    // 99th percentile of chi-squared with 119 degrees of freedom.
    CHECK(chi2 < 157.7995);
  }
}

TEST_CASE("local_update") {
  SUBCASE("prox_mu 0 matches plain SGD") {
    Fixture f(2);
    LocalTrainConfig cfg{4, 0.1, 5e-4, 0.0};
    nn::ParamStore plain = f.store;
    Rng r1(9), r2(9);
    auto res = local_update(f.store, f.spec, cfg, f.data, f.store.params(), r1);
    for (int s = 0; s < 4; ++s) {
      auto fwd = nn::forward(f.spec, plain, f.data.features, f.data.ops, nn::Mode::kTrain, &r2);
      auto l = nn::masked_softmax_cross_entropy(fwd.logits, f.data.labels, f.data.masks.train);
      nn::backward(f.spec, plain, fwd.cache, l.dlogits);
      nn::sgd_step(plain, 0.1, 5e-4);
    }
    CHECK(bitwise_equal(res.params, plain.params()));
    CHECK(res.train_count == 10);
    CHECK(r1 == r2);
  }
  SUBCASE("single step equals a hand-rolled update") {
    Fixture f(3);
    f.spec.dropout = 0.0;
    LocalTrainConfig cfg{1, 0.1, 0.0, 0.0};
    const NamedTensorMap before = f.store.params();
    nn::ParamStore probe = f.store;
    Rng rng(1);
    auto res = local_update(f.store, f.spec, cfg, f.data, before, rng);
    auto fwd = nn::forward(f.spec, probe, f.data.features, f.data.ops, nn::Mode::kEval, nullptr);
    auto l = nn::masked_softmax_cross_entropy(fwd.logits, f.data.labels, f.data.masks.train);
    nn::backward(f.spec, probe, fwd.cache, l.dlogits);
    CHECK(bitwise_equal(local_gradient(probe, f.spec, f.data), probe.grads()));
    auto noisy = f.spec;
    noisy.dropout = 0.5;
    CHECK(bitwise_equal(local_gradient(probe, noisy, f.data), probe.grads()));
    for (const auto& [name, w] : before) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        CHECK(res.params.at(name).data()[i] == w.data()[i] - 0.1 * probe.grads().at(name).data()[i]);
      }
    }
  }
  SUBCASE("larger prox_mu keeps parameters closer to the global model") {
    double prev = 1e300;
    for (double mu : {0.0, 1.0, 10.0}) {
      Fixture f(4);
      const NamedTensorMap global = f.store.params();
      Rng rng(8);
      auto res = local_update(f.store, f.spec, LocalTrainConfig{16, 0.05, 0.0, mu}, f.data, global, rng);
      const double dist = norm_diff(res.params, global);
      CHECK(dist < prev);
      prev = dist;
    }
  }
  SUBCASE("empty train mask") {
    Fixture f(5);
    std::fill(f.data.masks.train.begin(), f.data.masks.train.end(), 0);
    Rng rng(1);
    CHECK_THROWS_AS(local_update(f.store, f.spec, LocalTrainConfig{}, f.data, {}, rng), Error);
  }
}
