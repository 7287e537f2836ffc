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
#include <numeric>

#include "doctest.h"
#include "fedgraph/common/error.hpp"
#include "fedgraph/nn/loss.hpp"
#include "fedgraph/nn/model.hpp"
#include "fedgraph/nn/ops.hpp"
#include "support/gradcheck.hpp"

using namespace fedgraph;
using namespace fedgraph::nn;
using fedgraph::testing::grad_check;
using fedgraph::testing::random_collection;
using fedgraph::testing::random_node_graph;

namespace {

ModelSpec node_spec(GnnKind kind, std::size_t in, std::size_t classes) {
  ModelSpec s;
  s.in_dim = in;
  s.num_classes = classes;
  s.kind = kind;
  if (kind == GnnKind::kGprgnn) {
    s.encoder = {6, classes};
    s.k_prop = 3;
  } else {
    s.gnn_dims = {5, classes};
  }
  return s;
}

std::vector<std::uint8_t> all_rows(std::size_t n) { return std::vector<std::uint8_t>(n, 1); }

}  // namespace

TEST_CASE("ops reject mismatched shapes") {
  CHECK_THROWS_AS(matmul(Tensor(2, 3), Tensor(2, 3)), Error);
  CHECK(matmul_tn(Tensor(2, 3, 1.0), Tensor(2, 4, 1.0)).same_shape(Tensor(3, 4)));
  CHECK(matmul_nt(Tensor(2, 3, 1.0), Tensor(4, 3, 1.0))(1, 3) == 3.0);
}

TEST_CASE("spec validation") {
  ModelSpec s = node_spec(GnnKind::kGcn, 4, 3);
  CHECK_NOTHROW(s.validate());
  s.gnn_dims = {5, 2};
  CHECK_THROWS_AS(s.validate(), Error);
  s = node_spec(GnnKind::kGprgnn, 4, 3);
  s.k_prop = 0;
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("init_params") {
  Rng a(7), b(7);
  for (auto kind : {GnnKind::kGcn, GnnKind::kSage, GnnKind::kGprgnn}) {
    ModelSpec spec = node_spec(kind, 4, 3);
    auto s1 = init_params(spec, a);
    auto s2 = init_params(spec, b);
    CHECK(bitwise_equal(s1.params(), s2.params()));
    for (const auto& [name, t] : s1.params()) {
      if (name.ends_with("bias")) {
        CHECK(std::all_of(t.data().begin(), t.data().end(), [](double v) { return v == 0.0; }));
      }
      if (is_weight_name(name)) {
        const double bound = std::sqrt(6.0 / static_cast<double>(t.rows() + t.cols()));
        CHECK(std::all_of(t.data().begin(), t.data().end(),
                          [&](double v) { return std::abs(v) <= bound; }));
      }
    }
  }
  SUBCASE("gpr coefficients for K=2") {
    ModelSpec spec = node_spec(GnnKind::kGprgnn, 4, 3);
    spec.k_prop = 2;
    auto store = init_params(spec, a);
    const Tensor& g = store.params().at("gnn.gamma");
    REQUIRE(g.cols() == 3);
    CHECK(g(0, 0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(g(0, 1) == doctest::Approx(0.09).epsilon(1e-15));
    CHECK(g(0, 2) == doctest::Approx(0.81).epsilon(1e-15));
  }
  CHECK(is_weight_name("gnn.0.weight_self"));
  CHECK_FALSE(is_weight_name("gnn.0.bias"));
  CHECK_FALSE(is_weight_name("gnn.gamma"));
}

TEST_CASE("forward examples") {
  Rng rng(3);
  Graph g = random_node_graph(rng, 6, 4, 3);
  for (auto kind : {GnnKind::kGcn, GnnKind::kSage}) {
    ModelSpec spec = node_spec(kind, 4, 3);
    auto store = init_params(spec, rng);
    Tensor zero(6, 4);
    auto ops = make_operators(g);
    auto out = forward(spec, store, zero, ops, Mode::kEval, nullptr);
    CHECK(std::all_of(out.logits.data().begin(), out.logits.data().end(),
                      [](double v) { return v == 0.0; }));
  }
  SUBCASE("gprgnn on a single node mixes hops by their sum") {
    ModelSpec spec;
    spec.in_dim = 2;
    spec.num_classes = 2;
    spec.kind = GnnKind::kGprgnn;
    spec.encoder = {2};
    spec.k_prop = 1;
    auto store = init_params(spec, rng);
    store.mutable_params()["gnn.gamma"] = Tensor(1, 2, {0.3, 0.5});
    Graph one = build_graph({}, 1, Tensor(1, 2, {1.0, -2.0}));
    auto ops = make_operators(one);
    auto out = forward(spec, store, one.features, ops, Mode::kEval, nullptr);
    Tensor h0 = matmul(one.features, store.params().at("encoder.0.weight"));
    add_row_vector(h0, store.params().at("encoder.0.bias"));
    CHECK(out.logits(0, 0) == doctest::Approx(0.8 * h0(0, 0)).epsilon(1e-14));
    CHECK(out.logits(0, 1) == doctest::Approx(0.8 * h0(0, 1)).epsilon(1e-14));
  }
  SUBCASE("eval mode is repeatable, train mode draws dropout masks") {
    ModelSpec spec = node_spec(GnnKind::kSage, 4, 3);
    spec.dropout = 0.5;
    auto store = init_params(spec, rng);
    auto norm = sym_normalized_adjacency(g);
    Rng r1(1), r2(1);
    auto e1 = forward(spec, store, g, norm, Mode::kEval, &r1);
    auto e2 = forward(spec, store, g, norm, Mode::kEval, &r2);
    CHECK(bitwise_equal(e1.logits, e2.logits));
    CHECK(r1 == Rng(1));
    auto t1 = forward(spec, store, g, norm, Mode::kTrain, &r1);
    auto t2 = forward(spec, store, g, norm, Mode::kTrain, &r2);
    CHECK(bitwise_equal(t1.logits, t2.logits));
    CHECK_FALSE(bitwise_equal(t1.logits, e1.logits));
  }
  SUBCASE("feature width mismatch") {
    ModelSpec spec = node_spec(GnnKind::kGcn, 5, 3);
    auto store = init_params(spec, rng);
    auto ops = make_operators(g);
    CHECK_THROWS_AS(forward(spec, store, g.features, ops, Mode::kEval, nullptr), Error);
  }
}

TEST_CASE("cross-entropy") {
  Tensor uniform(1, 2, 0.0);
  std::vector<int> y{0};
  auto r = masked_softmax_cross_entropy(uniform, y, all_rows(1));
  CHECK(r.loss == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  Tensor confident(1, 2, {800.0, 0.0});
  CHECK(masked_softmax_cross_entropy(confident, y, all_rows(1)).loss == doctest::Approx(0.0));
  std::vector<std::uint8_t> none(1, 0);
  CHECK_THROWS_AS(masked_softmax_cross_entropy(uniform, y, none), Error);

  SUBCASE("gradient matches finite differences on a random 3x4 instance") {
    Rng rng(11);
    Tensor z(3, 4);
    for (auto& v : z.data()) v = rng.normal();
    std::vector<int> labels{2, 0, 3};
    std::vector<std::uint8_t> mask{1, 0, 1};
    auto base = masked_softmax_cross_entropy(z, labels, mask);
    double diff = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      Tensor up = z, down = z;
      up.data()[i] += 1e-5;
      down.data()[i] -= 1e-5;
      const double fd = (masked_softmax_cross_entropy(up, labels, mask).loss -
                         masked_softmax_cross_entropy(down, labels, mask).loss) / 2e-5;
      diff += (fd - base.dlogits.data()[i]) * (fd - base.dlogits.data()[i]);
      norm += base.dlogits.data()[i] * base.dlogits.data()[i];
    }
    CHECK(std::sqrt(diff / norm) < 1e-6);
    for (std::size_t c = 0; c < 4; ++c) CHECK(base.dlogits(1, c) == 0.0);
  }
}

TEST_CASE("accuracy") {
  Tensor z(3, 2, {2.0, 1.0, 0.0, 3.0, 1.0, 1.0});
  std::vector<int> perfect{0, 1, 0};
  std::vector<int> inverted{1, 0, 1};
  std::vector<int> two_of_three{0, 1, 1};
  CHECK(accuracy(z, perfect, all_rows(3)) == 1.0);
  CHECK(accuracy(z, inverted, all_rows(3)) == 0.0);
  CHECK(accuracy(z, two_of_three, all_rows(3)) == doctest::Approx(2.0 / 3.0));
  std::vector<std::uint8_t> none(3, 0);
  CHECK_THROWS_AS(accuracy(z, perfect, none), Error);
}

TEST_CASE("sgd_step") {
  auto make = [](const char* name, double w, double g) {
    ParamStore s;
    s.mutable_params()[name] = Tensor(1, 1, w);
    s.mutable_grads()[name] = Tensor(1, 1, g);
    return s;
  };
  auto s = make("l.weight", 1.0, 1.0);
  sgd_step(s, 0.1, 0.0);
  CHECK(s.params().at("l.weight")(0, 0) == doctest::Approx(0.9).epsilon(1e-15));
  s = make("l.weight", 2.0, 0.0);
  sgd_step(s, 0.1, 0.5);
  CHECK(s.params().at("l.weight")(0, 0) == doctest::Approx(1.9).epsilon(1e-15));
  s = make("l.bias", 2.0, 0.0);
  sgd_step(s, 0.1, 0.5);
  CHECK(s.params().at("l.bias")(0, 0) == 2.0);
  s = make("l.weight", 3.0, 7.0);
  sgd_step(s, 0.0, 0.5);
  CHECK(s.params().at("l.weight")(0, 0) == 3.0);
  ParamStore missing;
  missing.mutable_params()["l.weight"] = Tensor(1, 1, 1.0);
  CHECK_THROWS_AS(sgd_step(missing, 0.1, 0.0), Error);
}

TEST_CASE("backward") {
  Rng rng(5);
  Graph g = random_node_graph(rng, 8, 4, 3);
  ModelSpec spec = node_spec(GnnKind::kSage, 4, 3);
  auto store = init_params(spec, rng);
  auto ops = make_operators(g);
  auto fwd = forward(spec, store, g.features, ops, Mode::kEval, nullptr);
  SUBCASE("zero upstream gradient") {
    backward(spec, store, fwd.cache, Tensor(8, 3));
    CHECK(store.grads().size() == store.params().size());
    for (const auto& [name, t] : store.grads()) {
      CHECK(std::all_of(t.data().begin(), t.data().end(), [](double v) { return v == 0.0; }));
    }
  }
  SUBCASE("stale cache") {
    store.mutable_params()["gnn.0.bias"](0, 0) = 1.0;
    CHECK_THROWS_AS(backward(spec, store, fwd.cache, Tensor(8, 3)), Error);
  }
  SUBCASE("repeatable with the same rng") {
    spec.dropout = 0.3;
    std::vector<std::uint8_t> mask = all_rows(8);
    auto run = [&](std::uint64_t seed) {
      Rng r(seed);
      auto f = forward(spec, store, g.features, ops, Mode::kTrain, &r);
      auto l = masked_softmax_cross_entropy(f.logits, g.labels, mask);
      backward(spec, store, f.cache, l.dlogits);
      return store.grads();
    };
    CHECK(bitwise_equal(run(9), run(9)));
  }
}

TEST_CASE("gradients match finite differences") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    for (auto kind : {GnnKind::kGcn, GnnKind::kSage, GnnKind::kGprgnn}) {
      Rng rng(seed, 17);
      const std::size_t n = 5 + rng.uniform_index(16);
      Graph g = random_node_graph(rng, n, 4, 3);
      ModelSpec spec = node_spec(kind, 4, 3);
      if (kind != GnnKind::kGprgnn) {
        spec.encoder = {5};
        spec.decoder = {3};
      }
      auto store = init_params(spec, rng);
      fedgraph::testing::jitter_params(store, rng);
      auto ops = make_operators(g);
      auto res = grad_check(spec, store, g.features, ops, g.labels, Mode::kEval, rng);
      INFO("kind " << to_string(kind) << " seed " << seed << " worst " << res.worst_param);
      CHECK(res.worst_rel_err < 1e-4);

      spec.dropout = 0.2;
      auto train = grad_check(spec, store, g.features, ops, g.labels, Mode::kTrain, rng);
      INFO("train worst " << train.worst_param);
      CHECK(train.worst_rel_err < 1e-4);

      ModelSpec graph_spec = spec;
      graph_spec.dropout = 0.0;
      graph_spec.readout = Readout::kMean;
      graph_spec.decoder = {4, 3};
      if (kind == GnnKind::kGprgnn) graph_spec.encoder = {6, 5};
      else graph_spec.gnn_dims = {5, 5};
      auto gstore = init_params(graph_spec, rng);
      fedgraph::testing::jitter_params(gstore, rng);
      auto batch = make_batch(random_collection(rng, 4, 4, 3));
      std::vector<int> labels{0, 2, 1, 2};
      auto gres = grad_check(graph_spec, gstore, batch.graph.features, batch.ops, labels,
                             Mode::kEval, rng);
      INFO("readout worst " << gres.worst_param);
      CHECK(gres.worst_rel_err < 1e-4);
    }
  }
}

TEST_CASE("permutation equivariance") {
  Rng rng(21);
  Graph g = random_node_graph(rng, 12, 4, 3);
  std::vector<NodeId> perm(12);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  std::vector<Edge> edges;
  for (auto [u, v] : g.edge_list()) edges.emplace_back(perm[u], perm[v]);
  Tensor x(12, 4);
  for (std::size_t i = 0; i < 12; ++i) {
    for (std::size_t j = 0; j < 4; ++j) x(perm[i], j) = g.features(i, j);
  }
  Graph pg = build_graph(edges, 12, std::move(x));
  for (auto kind : {GnnKind::kGcn, GnnKind::kSage, GnnKind::kGprgnn}) {
    ModelSpec spec = node_spec(kind, 4, 3);
    auto store = init_params(spec, rng);
    auto a = forward(spec, store, g, sym_normalized_adjacency(g), Mode::kEval, nullptr);
    auto b = forward(spec, store, pg, sym_normalized_adjacency(pg), Mode::kEval, nullptr);
    double worst = 0.0;
    for (std::size_t i = 0; i < 12; ++i) {
      for (std::size_t c = 0; c < 3; ++c) {
        worst = std::max(worst, std::abs(a.logits(i, c) - b.logits(perm[i], c)));
      }
    }
    CHECK(worst < 1e-12);
  }
}
