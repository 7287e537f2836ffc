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
#include <map>
#include <numeric>
#include <set>

#include "doctest.h"
#include "fedgraph/common/error.hpp"
#include "fedgraph/common/rng.hpp"
#include "fedgraph/datazoo/csbm.hpp"
#include "fedgraph/datazoo/louvain.hpp"
#include "fedgraph/datazoo/splitters.hpp"
#include "fedgraph/graph/graph_io.hpp"

using namespace fedgraph;
using namespace fedgraph::datazoo;

namespace {

Graph labeled_random_graph(Rng& rng, std::size_t n, std::size_t m) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < m; ++i) {
    edges.emplace_back(static_cast<NodeId>(rng.uniform_index(n)),
                       static_cast<NodeId>(rng.uniform_index(n)));
  }
  Tensor x(n, 2);
  for (auto& v : x.data()) v = rng.normal();
  std::vector<int> y(n);
  for (auto& v : y) v = static_cast<int>(rng.uniform_index(3));
  NodeMasks masks = stratified_masks(y, 0.6, 0.2, rng);
  return build_graph(edges, n, std::move(x), std::move(y), std::move(masks));
}

Graph two_cliques(std::size_t size) {
  std::vector<Edge> edges;
  for (NodeId base : {NodeId{0}, static_cast<NodeId>(size)}) {
    for (NodeId i = 0; i < size; ++i)
      for (NodeId j = i + 1; j < size; ++j) edges.emplace_back(base + i, base + j);
  }
  std::vector<int> labels(2 * size);
  for (std::size_t i = 0; i < 2 * size; ++i) labels[i] = i < size ? 0 : 1;
  return build_graph(edges, 2 * size, Tensor(2 * size, 1), labels);
}

// Modularity by the textbook double sum over all node pairs.
double brute_force_modularity(const Graph& g, const std::vector<std::size_t>& comm) {
  const std::size_t n = g.num_nodes;
  std::vector<double> k(n);
  double two_m = 0;
  for (NodeId u = 0; u < n; ++u) {
    k[u] = static_cast<double>(g.degree(u));
    two_m += k[u];
  }
  double q = 0;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = 0; j < n; ++j) {
      if (comm[i] != comm[j]) continue;
      const double a = g.has_edge(i, j) ? 1.0 : 0.0;
      q += a - k[i] * k[j] / two_m;
    }
  }
  return q / two_m;
}

// Union of client edges mapped back to source ids.
std::set<Edge> union_edges(const FederatedDataset& ds) {
  std::set<Edge> out;
  for (std::size_t c = 0; c < ds.graphs.size(); ++c) {
    for (auto [a, b] : ds.graphs[c].edge_list()) {
      NodeId u = ds.source_ids[c][a], v = ds.source_ids[c][b];
      out.insert({std::min(u, v), std::max(u, v)});
    }
  }
  return out;
}

double union_homophily(const FederatedDataset& ds) {
  std::size_t same = 0, total = 0;
  for (const auto& g : ds.graphs) {
    for (auto [u, v] : g.edge_list()) {
      ++total;
      if (g.labels[u] == g.labels[v]) ++same;
    }
  }
  return static_cast<double>(same) / static_cast<double>(total);
}

void check_partition(const FederatedDataset& ds, const Graph& src) {
  std::vector<int> seen(src.num_nodes, 0);
  for (const auto& ids : ds.source_ids)
    for (NodeId u : ids) ++seen[u];
  for (int s : seen) CHECK(s == 1);
  for (auto e : union_edges(ds)) CHECK(src.has_edge(e.first, e.second));
  for (std::size_t c = 0; c < ds.graphs.size(); ++c) {
    for (std::size_t i = 0; i < ds.graphs[c].num_nodes; ++i) {
      CHECK(ds.graphs[c].labels[i] == src.labels[ds.source_ids[c][i]]);
      CHECK(ds.graphs[c].masks.train[i] == src.masks.train[ds.source_ids[c][i]]);
    }
  }
}

CsbmParams csbm(std::vector<double> phi, std::uint64_t seed, std::size_t n = 250) {
  CsbmParams p;
  p.nodes_per_client = n;
  p.feature_dim = 16;
  p.avg_degree = 10;
  p.mu = 4;
  p.phi_per_client = std::move(phi);
  p.seed = seed;
  return p;
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kConfigError;
}

}  // namespace

TEST_CASE("louvain_partition") {
  SUBCASE("two disconnected triangles") {
    std::vector<Edge> e{{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}};
    Graph g = build_graph(e, 6);
    auto p = louvain_partition(g);
    CHECK(p.num_communities == 2);
    CHECK(p.modularity == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.community == std::vector<std::size_t>{0, 0, 0, 1, 1, 1});
  }
  SUBCASE("complete graph K4") {
    std::vector<Edge> e;
    for (NodeId i = 0; i < 4; ++i)
      for (NodeId j = i + 1; j < 4; ++j) e.emplace_back(i, j);
    CHECK(louvain_partition(build_graph(e, 4)).num_communities == 1);
  }
  SUBCASE("no edges") {
    CHECK(code_of([] { louvain_partition(build_graph({}, 3)); }) == ErrorCode::kNoEdges);
  }
  SUBCASE("modularity matches brute force and beats singletons") {
    Rng rng(4);
    for (int trial = 0; trial < 25; ++trial) {
      Graph g = labeled_random_graph(rng, 30, 60);
      if (g.num_edges() == 0) continue;
      auto p = louvain_partition(g);
      CHECK(p.modularity == doctest::Approx(brute_force_modularity(g, p.community)).epsilon(1e-10));
      std::vector<std::size_t> singletons(g.num_nodes);
      std::iota(singletons.begin(), singletons.end(), 0);
      CHECK(p.modularity >= brute_force_modularity(g, singletons) - 1e-12);
      CHECK(modularity(g, singletons) ==
            doctest::Approx(brute_force_modularity(g, singletons)).epsilon(1e-10));
    }
  }
  SUBCASE("recovers planted communities of a strong cSBM") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      auto params = csbm({1.0}, seed, 400);
      params.lambda_max = std::sqrt(10.0) * 0.95;
      Graph g = fedcsbm_generate(params).graphs[0];
      auto p = louvain_partition(g);
      // Map each community to its majority planted label.
      std::map<std::size_t, std::array<int, 2>> votes;
      for (NodeId u = 0; u < g.num_nodes; ++u) ++votes[p.community[u]][g.labels[u]];
      std::size_t agree = 0;
      for (auto& [c, v] : votes) agree += static_cast<std::size_t>(std::max(v[0], v[1]));
      CHECK(static_cast<double>(agree) / g.num_nodes >= 0.9);
    }
  }
  SUBCASE("deterministic") {
    Rng rng(77);
    Graph g = labeled_random_graph(rng, 40, 90);
    CHECK(louvain_partition(g).community == louvain_partition(g).community);
  }
}

TEST_CASE("random_splitter") {
  Rng rng(1);
  Graph g = labeled_random_graph(rng, 10, 20);
  SUBCASE("equal partition") {
    auto ds = random_splitter(g, 5, {}, 3);
    REQUIRE(ds.graphs.size() == 5);
    for (const auto& c : ds.graphs) CHECK(c.num_nodes == 2);
    check_partition(ds, g);
  }
  SUBCASE("single client is the whole graph") {
    auto ds = random_splitter(g, 1, {}, 3);
    CHECK(ds.graphs[0] == g);
  }
  SUBCASE("sizes differ by at most one") {
    Graph h = labeled_random_graph(rng, 23, 40);
    auto ds = random_splitter(h, 4, {}, 9);
    std::vector<std::size_t> sizes;
    for (const auto& c : ds.graphs) sizes.push_back(c.num_nodes);
    CHECK(*std::max_element(sizes.begin(), sizes.end()) -
              *std::min_element(sizes.begin(), sizes.end()) <= 1);
    check_partition(ds, h);
  }
  SUBCASE("drop exactly floor(frac * m) edges") {
    std::vector<Edge> edges;
    for (NodeId i = 0; i < 40; ++i) edges.emplace_back(i, (i + 1) % 40);
    Graph ring = build_graph(edges, 40);
    RandomSplitOptions opt;
    opt.drop_edge_frac = 0.5;
    auto ds = random_splitter(ring, 1, opt, 5);
    CHECK(ds.graphs[0].num_edges() == 20);
    for (auto [u, v] : ds.graphs[0].edge_list()) CHECK(ring.has_edge(u, v));
    opt.drop_edge_frac = 0.3;
    CHECK(random_splitter(ring, 1, opt, 5).graphs[0].num_edges() == 28);
  }
  SUBCASE("overlap copies nodes into a second client") {
    Graph h = labeled_random_graph(rng, 50, 100);
    RandomSplitOptions opt;
    opt.overlap = true;
    opt.overlap_frac = 0.2;
    auto ds = random_splitter(h, 3, opt, 2);
    std::size_t total = 0;
    for (const auto& c : ds.graphs) total += c.num_nodes;
    CHECK(total == 60);
    for (auto e : union_edges(ds)) CHECK(h.has_edge(e.first, e.second));
  }
  SUBCASE("errors") {
    CHECK(code_of([&] { random_splitter(g, 11, {}, 0); }) == ErrorCode::kTooManyClients);
    RandomSplitOptions opt;
    opt.drop_edge_frac = 1.0;
    CHECK(code_of([&] { random_splitter(g, 2, opt, 0); }) == ErrorCode::kInvalidParams);
  }
}

TEST_CASE("community_splitter") {
  SUBCASE("two cliques onto two clients") {
    Graph g = two_cliques(5);
    auto ds = community_splitter(g, 2, 0);
    REQUIRE(ds.graphs.size() == 2);
    CHECK(ds.graphs[0].num_edges() + ds.graphs[1].num_edges() == g.num_edges());
    for (const auto& c : ds.graphs) {
      CHECK(c.num_nodes == 5);
      CHECK(std::all_of(c.labels.begin(), c.labels.end(), [&](int y) { return y == c.labels[0]; }));
    }
    check_partition(ds, g);
  }
  SUBCASE("single client keeps every edge") {
    Graph g = two_cliques(4);
    auto ds = community_splitter(g, 1, 0);
    CHECK(ds.graphs[0].num_edges() == g.num_edges());
  }
  SUBCASE("fallback splits the largest community") {
    Graph g = two_cliques(4);
    auto ds = community_splitter(g, 3, 7);
    REQUIRE(ds.graphs.size() == 3);
    check_partition(ds, g);
    std::vector<std::size_t> sizes;
    for (const auto& c : ds.graphs) sizes.push_back(c.num_nodes);
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<std::size_t>{2, 2, 4});
  }
  SUBCASE("splitting raises homophily on a homophilic cSBM graph") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Graph g = fedcsbm_generate(csbm({0.8}, seed, 300)).graphs[0];
      auto ds = community_splitter(g, 4, seed);
      check_partition(ds, g);
      CHECK(union_homophily(ds) >= edge_homophily(g));
    }
  }
}

TEST_CASE("attribute_splitter") {
  auto graph_with_groups = [](std::vector<std::size_t> sizes) {
    std::size_t n = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
    Graph g = build_graph({}, n, Tensor(n, 1), std::vector<int>(n, 0));
    auto& col = g.node_attrs["venue"];
    for (std::size_t grp = 0; grp < sizes.size(); ++grp)
      for (std::size_t k = 0; k < sizes[grp]; ++k) col.push_back("g" + std::to_string(grp));
    return g;
  };
  SUBCASE("one group per client") {
    Graph g = graph_with_groups({3, 2, 4});
    auto ds = attribute_splitter(g, "venue", 3);
    for (std::size_t c = 0; c < 3; ++c) {
      const auto& col = ds.graphs[c].node_attrs.at("venue");
      CHECK(std::all_of(col.begin(), col.end(), [&](const auto& v) { return v == col[0]; }));
    }
    check_partition(ds, g);
  }
  SUBCASE("greedy balancing 5,4,3,3,2,1 onto 3") {
    Graph g = graph_with_groups({5, 4, 3, 3, 2, 1});
    auto ds = attribute_splitter(g, "venue", 3);
    for (const auto& c : ds.graphs) CHECK(c.num_nodes == 6);
    std::vector<std::size_t> sizes{5, 4, 3, 3, 2, 1};
    auto assign = greedy_balance(sizes, 3);
    CHECK(assign[0] == std::vector<std::size_t>{0, 5});
    CHECK(assign[1] == std::vector<std::size_t>{1, 4});
    CHECK(assign[2] == std::vector<std::size_t>{2, 3});
  }
  SUBCASE("errors") {
    Graph g = graph_with_groups({4});
    CHECK(code_of([&] { attribute_splitter(g, "venue", 2); }) == ErrorCode::kTooFewGroups);
    CHECK(code_of([&] { attribute_splitter(g, "org", 1); }) == ErrorCode::kUnknownAttribute);
  }
}

TEST_CASE("label_space_splitter") {
  auto two_class_items = [](std::size_t per_class) {
    std::vector<int> labels;
    for (std::size_t i = 0; i < 2 * per_class; ++i) labels.push_back(i % 2 ? 1 : 0);
    return labels;
  };
  SUBCASE("huge alpha stays close to the global histogram") {
    auto labels = two_class_items(2000);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Rng rng(seed);
      auto client = lda_assign(labels, 4, 1e4, rng);
      std::vector<std::array<double, 2>> hist(4, {0, 0});
      for (std::size_t i = 0; i < labels.size(); ++i) hist[client[i]][labels[i]] += 1;
      for (auto& h : hist) {
        const double share0 = h[0] / (h[0] + h[1]);
        // TV distance for two classes against the global (0.5, 0.5).
        CHECK(std::abs(share0 - 0.5) < 0.05);
      }
    }
  }
  SUBCASE("single client gets every item") {
    auto labels = two_class_items(10);
    Rng rng(1);
    auto client = lda_assign(labels, 1, 0.5, rng);
    CHECK(std::all_of(client.begin(), client.end(), [](std::size_t c) { return c == 0; }));
  }
  SUBCASE("small alpha skews the label distribution") {
    auto labels = two_class_items(500);
    double mean_dominant = 0;
    const int seeds = 20;
    for (int seed = 0; seed < seeds; ++seed) {
      Rng rng(static_cast<std::uint64_t>(seed));
      auto client = lda_assign(labels, 4, 0.1, rng);
      std::vector<std::array<double, 2>> hist(4, {0, 0});
      for (std::size_t i = 0; i < labels.size(); ++i) hist[client[i]][labels[i]] += 1;
      double dom = 0;
      for (auto& h : hist) dom += std::max(h[0], h[1]) / (h[0] + h[1]);
      mean_dominant += dom / 4;
      // Counts always sum to the total and no client is empty.
      double total = 0;
      for (auto& h : hist) {
        CHECK(h[0] + h[1] > 0);
        total += h[0] + h[1];
      }
      CHECK(total == labels.size());
    }
    CHECK(mean_dominant / seeds > 0.7);
  }
  SUBCASE("errors") {
    Rng rng(0);
    std::vector<int> gap{0, 0, 2, 2};
    CHECK(code_of([&] { lda_assign(gap, 2, 1.0, rng); }) == ErrorCode::kEmptyClass);
    std::vector<int> ok{0, 1};
    CHECK(code_of([&] { lda_assign(ok, 2, 0.0, rng); }) == ErrorCode::kInvalidParams);
  }
  SUBCASE("node-level split partitions the labeled nodes") {
    Rng rng(3);
    Graph g = labeled_random_graph(rng, 60, 120);
    auto ds = label_space_splitter(g, 3, 0.5, 11);
    check_partition(ds, g);
  }
  SUBCASE("collection split") {
    GraphCollection coll;
    for (int i = 0; i < 12; ++i) {
      coll.graphs.push_back(build_graph({}, 1, Tensor(1, 1), {0}));
      coll.graph_labels.push_back(i % 3);
    }
    auto ds = label_space_splitter(coll, 3, 1.0, 4);
    std::size_t total = 0;
    for (const auto& c : ds.collections) total += c.graphs.size();
    CHECK(total == 12);
  }
}

TEST_CASE("instance_space_splitter") {
  auto coll_with_props = [](std::vector<double> props) {
    GraphCollection c;
    for (double p : props) {
      c.graphs.push_back(build_graph({}, 1, Tensor(1, 1, p), {0}));
      c.graph_labels.push_back(0);
      c.graph_props.push_back(p);
    }
    return c;
  };
  SUBCASE("sorted props") {
    auto ds = instance_space_splitter(coll_with_props({1, 2, 3, 4}), 2);
    CHECK(ds.source_ids[0] == std::vector<NodeId>{0, 1});
    CHECK(ds.source_ids[1] == std::vector<NodeId>{2, 3});
  }
  SUBCASE("reversed props give the same segments") {
    auto a = instance_space_splitter(coll_with_props({1, 2, 3, 4}), 2);
    auto b = instance_space_splitter(coll_with_props({4, 3, 2, 1}), 2);
    for (std::size_t c = 0; c < 2; ++c) {
      auto pa = a.collections[c].graph_props, pb = b.collections[c].graph_props;
      std::sort(pa.begin(), pa.end());
      std::sort(pb.begin(), pb.end());
      CHECK(pa == pb);
    }
  }
  SUBCASE("remainder goes to the first segments") {
    auto ds = instance_space_splitter(coll_with_props({5, 1, 4, 2, 3}), 2);
    CHECK(ds.collections[0].graphs.size() == 3);
    CHECK(ds.collections[1].graphs.size() == 2);
    CHECK(ds.collections[0].graph_props == std::vector<double>{1, 2, 3});
  }
  SUBCASE("missing props") {
    auto c = coll_with_props({1, 2});
    c.graph_props.clear();
    CHECK(code_of([&] { instance_space_splitter(c, 2); }) == ErrorCode::kMissingProps);
  }
}

TEST_CASE("fedcsbm_generate") {
  SUBCASE("phi = 0 gives homophily one half") {
    double mean = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      mean += edge_homophily(fedcsbm_generate(csbm({0.0}, seed, 500)).graphs[0]) / 5;
    }
    CHECK(mean == doctest::Approx(0.5).epsilon(0.03));
  }
  SUBCASE("deterministic") {
    auto a = fedcsbm_generate(csbm({0.3, 0.3}, 9));
    auto b = fedcsbm_generate(csbm({0.3, 0.3}, 9));
    CHECK(a.graphs == b.graphs);
  }
  SUBCASE("homophily increases with phi") {
    std::vector<double> phis{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
    std::vector<double> mean(phis.size(), 0.0);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto ds = fedcsbm_generate(csbm(phis, seed, 500));
      for (std::size_t c = 0; c < phis.size(); ++c) mean[c] += edge_homophily(ds.graphs[c]) / 5;
    }
    for (std::size_t c = 1; c < phis.size(); ++c) CHECK(mean[c] > mean[c - 1]);
  }
  SUBCASE("feature marginals agree across clients") {
    auto ds = fedcsbm_generate(csbm({0.1, 0.8}, 21, 500));
    const auto& x0 = ds.graphs[0].features;
    const auto& x1 = ds.graphs[1].features;
    const double n = 500;
    for (std::size_t k = 0; k < x0.cols(); ++k) {
      double m0 = 0, m1 = 0, v0 = 0, v1 = 0;
      for (std::size_t i = 0; i < 500; ++i) {
        m0 += x0(i, k) / n;
        m1 += x1(i, k) / n;
      }
      for (std::size_t i = 0; i < 500; ++i) {
        v0 += (x0(i, k) - m0) * (x0(i, k) - m0) / (n - 1);
        v1 += (x1(i, k) - m1) * (x1(i, k) - m1) / (n - 1);
      }
      const double mean_sigma = std::sqrt(v0 / n + v1 / n);
      CHECK(std::abs(m0 - m1) < 3 * mean_sigma);
      const double var_sigma = std::sqrt(2 * v0 * v0 / (n - 1) + 2 * v1 * v1 / (n - 1));
      CHECK(std::abs(v0 - v1) < 3 * var_sigma);
    }
  }
  SUBCASE("masks are stratified 60/20/20") {
    auto ds = fedcsbm_generate(csbm({0.5}, 2, 500));
    const auto& g = ds.graphs[0];
    g.validate();
    std::size_t train = std::count(g.masks.train.begin(), g.masks.train.end(), 1);
    std::size_t valid = std::count(g.masks.valid.begin(), g.masks.valid.end(), 1);
    std::size_t test = std::count(g.masks.test.begin(), g.masks.test.end(), 1);
    CHECK(train + valid + test == 500);
    CHECK(train == doctest::Approx(300).epsilon(0.01));
    CHECK(valid == doctest::Approx(100).epsilon(0.02));
  }
  SUBCASE("invalid params") {
    auto p = csbm({0.5}, 0, 20);
    p.lambda_max = 10;
    CHECK(code_of([&] { fedcsbm_generate(p); }) == ErrorCode::kInvalidParams);
    auto q = csbm({1.5}, 0);
    CHECK(code_of([&] { fedcsbm_generate(q); }) == ErrorCode::kInvalidParams);
  }
}

TEST_CASE("datasets replay byte-identically from their manifest") {
  Rng rng(5);
  Graph g = labeled_random_graph(rng, 80, 200);
  g.node_attrs["org"].resize(80);
  for (auto& v : g.node_attrs["org"]) v = "o" + std::to_string(rng.uniform_index(4));
  RandomSplitOptions opt;
  opt.drop_edge_frac = 0.25;
  std::vector<FederatedDataset> splits{random_splitter(g, 3, opt, 17), community_splitter(g, 3, 17),
                                       attribute_splitter(g, "org", 2),
                                       label_space_splitter(g, 3, 0.3, 17)};
  auto root = std::filesystem::temp_directory_path() / "fedgraph_datazoo_test";
  for (const auto& ds : splits) {
    std::filesystem::remove_all(root);
    save_dataset(ds, root / "a");
    auto loaded = load_dataset(root / "a");
    CHECK(loaded.manifest.to_json() == ds.manifest.to_json());
    CHECK(loaded.graphs == ds.graphs);
    auto replay = split_from_manifest(g, loaded.manifest);
    save_dataset(replay, root / "b");
    for (std::size_t c = 0; c < ds.num_clients(); ++c) {
      auto name = "client_" + std::to_string(c) + ".json";
      CHECK(read_file(root / "a" / name) == read_file(root / "b" / name));
    }
    CHECK(read_file(root / "a" / "manifest.json") == read_file(root / "b" / "manifest.json"));
    CHECK(ds.manifest.source_sha256 == fingerprint(g));
  }
  std::filesystem::remove_all(root);
}
