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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "doctest.h"
#include "fedgraph/common/error.hpp"
#include "fedgraph/common/rng.hpp"
#include "fedgraph/graph/graph.hpp"
#include "fedgraph/graph/graph_io.hpp"

using namespace fedgraph;

namespace {

Graph path3() {
  std::vector<Edge> e{{0, 1}, {1, 2}};
  return build_graph(e, 3);
}

Graph random_graph(Rng& rng, std::size_t n, std::size_t m, int classes = 3) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < m; ++i) {
    edges.emplace_back(static_cast<NodeId>(rng.uniform_index(n)),
                       static_cast<NodeId>(rng.uniform_index(n)));
  }
  Tensor x(n, 3);
  for (auto& v : x.data()) v = rng.normal();
  std::vector<int> y(n);
  NodeMasks masks;
  masks.train.assign(n, 0);
  masks.valid.assign(n, 0);
  masks.test.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<int>(rng.uniform_index(classes));
    switch (rng.uniform_index(4)) {
      case 0: masks.train[i] = 1; break;
      case 1: masks.valid[i] = 1; break;
      case 2: masks.test[i] = 1; break;
      default: break;
    }
  }
  return build_graph(edges, n, std::move(x), std::move(y), std::move(masks));
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("fedgraph_graph_test_" + name);
}

}  // namespace

TEST_CASE("build_graph symmetrizes and dedups") {
  SUBCASE("single edge") {
    std::vector<Edge> e{{0, 1}};
    Graph g = build_graph(e, 2);
    CHECK(g.row_ptr == std::vector<std::size_t>{0, 1, 2});
    CHECK(g.col_idx == std::vector<NodeId>{1, 0});
  }
  SUBCASE("empty graph") {
    Graph g = build_graph({}, 3);
    CHECK(g.row_ptr == std::vector<std::size_t>{0, 0, 0, 0});
    CHECK(g.num_edges() == 0);
  }
  SUBCASE("duplicate reverse edge") {
    std::vector<Edge> e{{0, 1}, {1, 0}, {1, 2}};
    Graph g = build_graph(e, 3);
    CHECK(g.row_ptr == std::vector<std::size_t>{0, 1, 3, 4});
    CHECK(g.col_idx == std::vector<NodeId>{1, 0, 2, 1});
  }
  SUBCASE("self-loops dropped") {
    std::vector<Edge> e{{0, 0}, {0, 1}};
    Graph g = build_graph(e, 2);
    CHECK(g.num_edges() == 1);
  }
  SUBCASE("errors") {
    std::vector<Edge> e{{0, 3}};
    CHECK_THROWS_AS(build_graph(e, 3), Error);
    try {
      build_graph(e, 3);
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::kOutOfRangeNode);
    }
    try {
      build_graph({}, 3, Tensor(2, 1));
      FAIL("expected ShapeMismatch");
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::kShapeMismatch);
    }
    try {
      build_graph({}, 3, Tensor(3, 1), {0, 1});
      FAIL("expected ShapeMismatch");
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::kShapeMismatch);
    }
  }
}

TEST_CASE("build_graph output always satisfies the invariants") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + rng.uniform_index(30);
    std::size_t m = rng.uniform_index(3 * n);
    Graph g = random_graph(rng, n, m);
    CHECK_NOTHROW(g.validate());
  }
}

TEST_CASE("sym_normalized_adjacency") {
  SUBCASE("single node") {
    Graph g = build_graph({}, 1);
    auto a = sym_normalized_adjacency(g, true);
    CHECK(a.values == std::vector<double>{1.0});
    auto b = sym_normalized_adjacency(g, false);
    CHECK(b.values.empty());
  }
  SUBCASE("single edge") {
    std::vector<Edge> e{{0, 1}};
    auto a = sym_normalized_adjacency(build_graph(e, 2), true);
    REQUIRE(a.values.size() == 4);
    for (double w : a.values) CHECK(w == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("path") {
    auto a = sym_normalized_adjacency(path3(), true);
    CHECK(a.at(0, 0) == doctest::Approx(0.5));
    CHECK(a.at(0, 1) == doctest::Approx(1.0 / std::sqrt(6.0)));
    CHECK(a.at(0, 1) == doctest::Approx(0.40825).epsilon(1e-5));
    CHECK(a.at(1, 1) == doctest::Approx(1.0 / 3.0));
    CHECK(a.at(0, 2) == 0.0);
  }
  SUBCASE("regular graphs: off-diagonal weight is 1/(d+1)") {
    std::vector<Edge> cycle;
    for (NodeId i = 0; i < 7; ++i) cycle.emplace_back(i, (i + 1) % 7);
    auto a = sym_normalized_adjacency(build_graph(cycle, 7), true);
    for (NodeId u = 0; u < 7; ++u) {
      CHECK(a.at(u, (u + 1) % 7) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }
    std::vector<Edge> k4;
    for (NodeId i = 0; i < 4; ++i)
      for (NodeId j = i + 1; j < 4; ++j) k4.emplace_back(i, j);
    auto b = sym_normalized_adjacency(build_graph(k4, 4), true);
    for (std::size_t k = 0; k < b.values.size(); ++k) CHECK(b.values[k] == doctest::Approx(0.25));
  }
  SUBCASE("spectral radius at most one on random graphs") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      Graph g = random_graph(rng, 25, 40);
      auto a = sym_normalized_adjacency(g, true);
      // Power iteration on A^2 (PSD) for the largest |eigenvalue|^2.
      Tensor v(g.num_nodes, 1);
      for (auto& x : v.data()) x = rng.uniform() + 0.1;
      double lambda = 0;
      for (int it = 0; it < 300; ++it) {
        Tensor w = spmm(a, spmm(a, v));
        double norm = std::sqrt(std::inner_product(w.data().begin(), w.data().end(),
                                                   w.data().begin(), 0.0));
        double vnorm = std::sqrt(std::inner_product(v.data().begin(), v.data().end(),
                                                    v.data().begin(), 0.0));
        lambda = norm / vnorm;
        for (auto& x : w.data()) x /= norm;
        v = w;
      }
      CHECK(std::sqrt(lambda) <= 1.0 + 1e-9);
    }
  }
  SUBCASE("spmm_transposed matches the symmetric product") {
    Rng rng(3);
    Graph g = random_graph(rng, 12, 20);
    auto a = mean_adjacency(g);
    Tensor x(12, 2);
    for (auto& v : x.data()) v = rng.normal();
    Tensor t = spmm_transposed(a, x);
    for (std::size_t c = 0; c < 12; ++c) {
      for (std::size_t j = 0; j < 2; ++j) {
        double expect = 0;
        for (std::size_t r = 0; r < 12; ++r) expect += a.at(r, c) * x(r, j);
        CHECK(t(c, j) == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("edge_homophily") {
  std::vector<Edge> e{{0, 1}};
  CHECK(edge_homophily(build_graph(e, 2, {}, {0, 0})) == 1.0);
  CHECK(edge_homophily(build_graph(e, 2, {}, {0, 1})) == 0.0);
  std::vector<Edge> tri{{0, 1}, {1, 2}, {0, 2}};
  CHECK(edge_homophily(build_graph(tri, 3, {}, {0, 0, 1})) == doctest::Approx(1.0 / 3.0));

  try {
    edge_homophily(build_graph({}, 2, {}, {0, 0}));
    FAIL("expected NoEdges");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::kNoEdges);
  }
  try {
    edge_homophily(build_graph(e, 2, {}, {0, -1}));
    FAIL("expected UnlabeledEndpoint");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::kUnlabeledEndpoint);
  }

  SUBCASE("invariant under node relabeling") {
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
      Graph g = random_graph(rng, 20, 50);
      std::vector<NodeId> perm(20);
      std::iota(perm.begin(), perm.end(), 0);
      rng.shuffle(perm);
      std::vector<Edge> pe;
      for (auto [u, v] : g.edge_list()) pe.emplace_back(perm[u], perm[v]);
      std::vector<int> py(20);
      for (NodeId u = 0; u < 20; ++u) py[perm[u]] = g.labels[u];
      Graph h = build_graph(pe, 20, {}, py);
      CHECK(edge_homophily(h) == edge_homophily(g));
    }
  }
}

TEST_CASE("induced_subgraph") {
  std::vector<Edge> tri{{0, 1}, {1, 2}, {0, 2}};
  Graph t = build_graph(tri, 3);
  SUBCASE("full node set is an identity copy") {
    std::vector<NodeId> all{0, 1, 2};
    auto sub = induced_subgraph(t, all);
    CHECK(sub.graph == t);
    CHECK(sub.old_ids == all);
  }
  SUBCASE("triangle pair") {
    std::vector<NodeId> nodes{0, 1};
    CHECK(induced_subgraph(t, nodes).graph.num_edges() == 1);
  }
  SUBCASE("path endpoints") {
    std::vector<NodeId> nodes{2, 0};
    auto sub = induced_subgraph(path3(), nodes);
    CHECK(sub.graph.num_nodes == 2);
    CHECK(sub.graph.num_edges() == 0);
    CHECK(sub.old_ids == std::vector<NodeId>{0, 2});
  }
  SUBCASE("out of range") {
    std::vector<NodeId> nodes{5};
    try {
      induced_subgraph(t, nodes);
      FAIL("expected OutOfRangeNode");
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::kOutOfRangeNode);
    }
  }
  SUBCASE("keeps exactly the within-set edges") {
    Rng rng(8);
    for (int trial = 0; trial < 30; ++trial) {
      Graph g = random_graph(rng, 20, 45);
      std::vector<NodeId> nodes;
      for (NodeId u = 0; u < 20; ++u)
        if (rng.bernoulli(0.5)) nodes.push_back(u);
      auto sub = induced_subgraph(g, nodes);
      sub.graph.validate();
      std::size_t expected = 0;
      for (auto [u, v] : g.edge_list()) {
        bool in_u = std::binary_search(sub.old_ids.begin(), sub.old_ids.end(), u);
        bool in_v = std::binary_search(sub.old_ids.begin(), sub.old_ids.end(), v);
        if (in_u && in_v) ++expected;
      }
      CHECK(sub.graph.num_edges() == expected);
      for (auto [a, b] : sub.graph.edge_list()) {
        CHECK(g.has_edge(sub.old_ids[a], sub.old_ids[b]));
        CHECK(sub.graph.labels[a] == g.labels[sub.old_ids[a]]);
      }
    }
  }
}

TEST_CASE("graph file round trip and validation") {
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    Graph g = random_graph(rng, 15, 30);
    g.node_attrs["venue"].resize(15);
    for (auto& v : g.node_attrs["venue"]) v = "v" + std::to_string(rng.uniform_index(3));
    if (trial % 2) {
      g.edge_weight.resize(g.col_idx.size());
      for (auto [u, v] : g.edge_list()) {
        double w = rng.uniform();
        for (auto [a, b] : {Edge{u, v}, Edge{v, u}}) {
          auto nb = g.neighbors(a);
          g.edge_weight[g.row_ptr[a] + (std::lower_bound(nb.begin(), nb.end(), b) - nb.begin())] = w;
        }
      }
    }
    auto p = temp_path("rt.json");
    save_graph(g, p);
    Graph h = load_graph(p);
    CHECK(h == g);
    for (std::size_t i = 0; i < g.features.size(); ++i) {
      CHECK(std::bit_cast<std::uint64_t>(h.features.data()[i]) ==
            std::bit_cast<std::uint64_t>(g.features.data()[i]));
    }
    std::filesystem::remove(p);
  }

  auto expect_code = [](const std::string& text, ErrorCode code) {
    auto p = temp_path("bad.json");
    write_file(p, text);
    try {
      load_graph(p);
      FAIL("expected error for " << text);
    } catch (const Error& err) {
      CHECK(err.code() == code);
    }
    std::filesystem::remove(p);
  };
  expect_code(R"({"format_version":1,"directed":false,"num_nodes":3,"edges":[[0,99]]})",
              ErrorCode::kInvariantViolation);
  expect_code(R"({"format_version":1,"directed":true,"num_nodes":3,"edges":[[0,1]]})",
              ErrorCode::kInvariantViolation);
  expect_code(R"({"format_version":1,"num_nodes":3,"edges":[[0,1]],"labels":[0,1]})",
              ErrorCode::kInvariantViolation);
  expect_code(R"({"format_version":1,"num_nodes":2,"edges":[],"labels":[0,-1],)"
              R"("masks":{"train":[1]}})",
              ErrorCode::kInvariantViolation);
  expect_code(R"({"format_version":1,"num_nodes":2,"edges":[],"labels":[0,0],)"
              R"("masks":{"train":[1],"test":[1]}})",
              ErrorCode::kInvariantViolation);
  expect_code("{not json", ErrorCode::kParseError);

  SUBCASE("undirected asymmetric list is symmetrized") {
    auto p = temp_path("sym.json");
    write_file(p, R"({"format_version":1,"directed":false,"num_nodes":3,"edges":[[0,1],[2,1]]})");
    Graph g = load_graph(p);
    CHECK(g.has_edge(1, 0));
    CHECK(g.has_edge(1, 2));
    std::filesystem::remove(p);
  }
  SUBCASE("directed symmetric list is accepted") {
    auto p = temp_path("dir.json");
    write_file(p, R"({"format_version":1,"directed":true,"num_nodes":2,"edges":[[0,1],[1,0]]})");
    CHECK(load_graph(p).num_edges() == 1);
    std::filesystem::remove(p);
  }
}
