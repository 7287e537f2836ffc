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

#include "fedgraph/datazoo/splitters.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "fedgraph/common/error.hpp"
#include "fedgraph/datazoo/louvain.hpp"

namespace fedgraph::datazoo {
namespace {

void check_clients(std::size_t num_clients, std::size_t items, const char* what) {
  if (num_clients < 1) throw Error(ErrorCode::kInvalidParams, "number of clients must be >= 1");
  if (num_clients > items) {
    throw Error(ErrorCode::kTooManyClients, std::to_string(num_clients) + " clients for " +
                                                std::to_string(items) + " " + what);
  }
}

Manifest make_manifest(std::string splitter, nlohmann::ordered_json config, std::uint64_t seed,
                       std::size_t num_clients, std::string source) {
  Manifest m;
  m.splitter = std::move(splitter);
  m.config = std::move(config);
  m.seed = seed;
  m.num_clients = num_clients;
  m.source_sha256 = std::move(source);
  return m;
}

// Induced subgraphs for each node set.
FederatedDataset node_partition(const Graph& g, std::vector<std::vector<NodeId>> sets,
                                Manifest manifest) {
  FederatedDataset ds;
  ds.manifest = std::move(manifest);
  for (auto& nodes : sets) {
    auto sub = induced_subgraph(g, nodes);
    ds.graphs.push_back(std::move(sub.graph));
    ds.source_ids.push_back(std::move(sub.old_ids));
  }
  return ds;
}

std::vector<std::vector<NodeId>> pack_groups(const std::vector<std::vector<NodeId>>& groups,
                                             std::size_t num_clients) {
  std::vector<std::size_t> sizes;
  for (const auto& grp : groups) sizes.push_back(grp.size());
  auto assignment = greedy_balance(sizes, num_clients);
  std::vector<std::vector<NodeId>> sets(num_clients);
  for (std::size_t c = 0; c < num_clients; ++c) {
    for (std::size_t gi : assignment[c]) {
      sets[c].insert(sets[c].end(), groups[gi].begin(), groups[gi].end());
    }
    std::sort(sets[c].begin(), sets[c].end());
  }
  return sets;
}

std::vector<std::size_t> segment_sizes(std::size_t items, std::size_t parts) {
  std::vector<std::size_t> sizes(parts, items / parts);
  for (std::size_t c = 0; c < items % parts; ++c) ++sizes[c];
  return sizes;
}

}  // namespace

std::vector<std::vector<std::size_t>> greedy_balance(std::span<const std::size_t> group_sizes,
                                                     std::size_t num_clients) {
  std::vector<std::size_t> order(group_sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return group_sizes[a] > group_sizes[b];
  });
  std::vector<std::vector<std::size_t>> assignment(num_clients);
  std::vector<std::size_t> load(num_clients, 0);
  for (std::size_t gi : order) {
    auto smallest = static_cast<std::size_t>(std::min_element(load.begin(), load.end()) - load.begin());
    assignment[smallest].push_back(gi);
    load[smallest] += group_sizes[gi];
  }
  return assignment;
}

Graph remove_edges(const Graph& g, std::span<const Edge> edges) {
  std::set<Edge> drop;
  for (auto [u, v] : edges) drop.insert({std::min(u, v), std::max(u, v)});
  Graph out = g;
  out.col_idx.clear();
  out.edge_weight.clear();
  out.row_ptr.assign(1, 0);
  for (NodeId u = 0; u < g.num_nodes; ++u) {
    for (std::size_t k = g.row_ptr[u]; k < g.row_ptr[u + 1]; ++k) {
      const NodeId v = g.col_idx[k];
      if (drop.contains({std::min(u, v), std::max(u, v)})) continue;
      out.col_idx.push_back(v);
      if (!g.edge_weight.empty()) out.edge_weight.push_back(g.edge_weight[k]);
    }
    out.row_ptr.push_back(out.col_idx.size());
  }
  return out;
}

FederatedDataset random_splitter(const Graph& g, std::size_t num_clients,
                                 const RandomSplitOptions& options, std::uint64_t seed) {
  check_clients(num_clients, g.num_nodes, "nodes");
  if (!(options.drop_edge_frac >= 0.0 && options.drop_edge_frac < 1.0)) {
    throw Error(ErrorCode::kInvalidParams, "drop_edge_frac must lie in [0, 1)");
  }
  if (options.overlap && !(options.overlap_frac >= 0.0 && options.overlap_frac <= 1.0)) {
    throw Error(ErrorCode::kInvalidParams, "overlap_frac must lie in [0, 1]");
  }
  Rng rng(seed);
  std::vector<NodeId> perm(g.num_nodes);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);

  std::vector<std::vector<NodeId>> sets(num_clients);
  std::vector<std::size_t> owner(g.num_nodes);
  std::size_t pos = 0;
  const auto sizes = segment_sizes(g.num_nodes, num_clients);
  for (std::size_t c = 0; c < num_clients; ++c) {
    for (std::size_t k = 0; k < sizes[c]; ++k, ++pos) {
      sets[c].push_back(perm[pos]);
      owner[perm[pos]] = c;
    }
  }
  if (options.overlap && num_clients > 1) {
    std::vector<NodeId> pick(g.num_nodes);
    std::iota(pick.begin(), pick.end(), 0);
    rng.shuffle(pick);
    const auto copies = static_cast<std::size_t>(std::floor(options.overlap_frac * g.num_nodes));
    for (std::size_t k = 0; k < copies; ++k) {
      const NodeId u = pick[k];
      std::size_t other = rng.uniform_index(num_clients - 1);
      if (other >= owner[u]) ++other;
      sets[other].push_back(u);
    }
  }
  for (auto& s : sets) std::sort(s.begin(), s.end());

  nlohmann::ordered_json config;
  config["overlap"] = options.overlap;
  config["overlap_frac"] = options.overlap_frac;
  config["drop_edge_frac"] = options.drop_edge_frac;
  auto ds = node_partition(g, std::move(sets),
                           make_manifest("random", config, seed, num_clients, fingerprint(g)));
  if (options.drop_edge_frac > 0.0) {
    for (auto& client : ds.graphs) {
      auto edges = client.edge_list();
      const auto drop =
          static_cast<std::size_t>(std::floor(options.drop_edge_frac * static_cast<double>(edges.size())));
      rng.shuffle(edges);
      edges.resize(drop);
      client = remove_edges(client, edges);
    }
  }
  return ds;
}

FederatedDataset community_splitter(const Graph& g, std::size_t num_clients, std::uint64_t seed) {
  check_clients(num_clients, g.num_nodes, "nodes");
  std::vector<std::vector<NodeId>> groups;
  if (g.num_edges() == 0) {
    for (NodeId u = 0; u < g.num_nodes; ++u) groups.push_back({u});
  } else {
    auto part = louvain_partition(g);
    groups.resize(part.num_communities);
    for (NodeId u = 0; u < g.num_nodes; ++u) groups[part.community[u]].push_back(u);
  }
  Rng rng(seed);
  while (groups.size() < num_clients) {
    auto largest = std::max_element(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
      return a.size() < b.size();
    });
    auto members = *largest;
    rng.shuffle(members);
    const std::size_t keep = (members.size() + 1) / 2;
    std::vector<NodeId> head(members.begin(), members.begin() + keep);
    std::vector<NodeId> tail(members.begin() + keep, members.end());
    std::sort(head.begin(), head.end());
    std::sort(tail.begin(), tail.end());
    *largest = std::move(head);
    groups.push_back(std::move(tail));
  }
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  config["algorithm"] = "louvain";
  return node_partition(g, pack_groups(groups, num_clients),
                        make_manifest("community", config, seed, num_clients, fingerprint(g)));
}

FederatedDataset attribute_splitter(const Graph& g, const std::string& attr,
                                    std::size_t num_clients) {
  auto it = g.node_attrs.find(attr);
  if (it == g.node_attrs.end()) throw Error(ErrorCode::kUnknownAttribute, "no node attribute \"" + attr + "\"");
  if (num_clients < 1) throw Error(ErrorCode::kInvalidParams, "number of clients must be >= 1");
  std::map<std::string, std::vector<NodeId>> by_value;
  for (NodeId u = 0; u < g.num_nodes; ++u) by_value[it->second[u]].push_back(u);
  if (by_value.size() < num_clients) {
    throw Error(ErrorCode::kTooFewGroups, std::to_string(by_value.size()) + " distinct values of \"" +
                                              attr + "\" for " + std::to_string(num_clients) +
                                              " clients");
  }
  std::vector<std::vector<NodeId>> groups;
  for (auto& [value, nodes] : by_value) groups.push_back(std::move(nodes));
  nlohmann::ordered_json config;
  config["attr"] = attr;
  return node_partition(g, pack_groups(groups, num_clients),
                        make_manifest("attribute", config, 0, num_clients, fingerprint(g)));
}

std::vector<std::size_t> lda_assign(std::span<const int> item_labels, std::size_t num_clients,
                                    double alpha, Rng& rng) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::kInvalidParams, "alpha must be > 0");
  check_clients(num_clients, item_labels.size(), "items");
  int max_label = -1;
  for (int y : item_labels) {
    if (y < 0) throw Error(ErrorCode::kInvalidParams, "negative item label");
    max_label = std::max(max_label, y);
  }
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(max_label + 1));
  for (std::size_t i = 0; i < item_labels.size(); ++i) by_class[item_labels[i]].push_back(i);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (by_class[c].empty()) throw Error(ErrorCode::kEmptyClass, "class " + std::to_string(c) + " has no items");
  }

  std::vector<std::size_t> client(item_labels.size(), 0);
  std::vector<double> cumulative(num_clients);
  for (const auto& items : by_class) {
    double sum = 0.0;
    for (std::size_t j = 0; j < num_clients; ++j) {
      sum += rng.gamma(alpha);
      cumulative[j] = sum;
    }
    if (!(sum > 0.0)) {
      // Every gamma draw underflowed: put all mass on one client.
      const std::size_t j = rng.uniform_index(num_clients);
      for (std::size_t k = 0; k < num_clients; ++k) cumulative[k] = k >= j ? 1.0 : 0.0;
      sum = 1.0;
    }
    for (std::size_t i : items) {
      const double u = rng.uniform() * sum;
      auto pos = std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin();
      client[i] = std::min<std::size_t>(static_cast<std::size_t>(pos), num_clients - 1);
    }
  }

  while (true) {
    std::vector<std::vector<std::size_t>> held(num_clients);
    for (std::size_t i = 0; i < client.size(); ++i) held[client[i]].push_back(i);
    auto empty = std::find_if(held.begin(), held.end(), [](const auto& h) { return h.empty(); });
    if (empty == held.end()) break;
    auto largest = std::max_element(held.begin(), held.end(), [](const auto& a, const auto& b) {
      return a.size() < b.size();
    });
    const std::size_t moved = (*largest)[rng.uniform_index(largest->size())];
    client[moved] = static_cast<std::size_t>(empty - held.begin());
  }
  return client;
}

FederatedDataset label_space_splitter(const Graph& g, std::size_t num_clients, double alpha,
                                      std::uint64_t seed) {
  std::vector<NodeId> items;
  std::vector<int> labels;
  for (NodeId u = 0; u < g.num_nodes; ++u) {
    if (g.labels[u] == kUnlabeled) continue;
    items.push_back(u);
    labels.push_back(g.labels[u]);
  }
  Rng rng(seed);
  auto client = lda_assign(labels, num_clients, alpha, rng);
  std::vector<std::vector<NodeId>> sets(num_clients);
  for (std::size_t i = 0; i < items.size(); ++i) sets[client[i]].push_back(items[i]);
  nlohmann::ordered_json config;
  config["alpha"] = alpha;
  return node_partition(g, std::move(sets),
                        make_manifest("label_space", config, seed, num_clients, fingerprint(g)));
}

FederatedDataset label_space_splitter(const GraphCollection& c, std::size_t num_clients,
                                      double alpha, std::uint64_t seed) {
  Rng rng(seed);
  auto client = lda_assign(c.graph_labels, num_clients, alpha, rng);
  FederatedDataset ds;
  nlohmann::ordered_json config;
  config["alpha"] = alpha;
  ds.manifest = make_manifest("label_space", config, seed, num_clients, fingerprint(c));
  ds.collections.resize(num_clients);
  ds.source_ids.resize(num_clients);
  for (std::size_t i = 0; i < client.size(); ++i) {
    auto& dst = ds.collections[client[i]];
    dst.graphs.push_back(c.graphs[i]);
    dst.graph_labels.push_back(c.graph_labels[i]);
    if (!c.graph_props.empty()) dst.graph_props.push_back(c.graph_props[i]);
    ds.source_ids[client[i]].push_back(static_cast<NodeId>(i));
  }
  return ds;
}

FederatedDataset instance_space_splitter(const GraphCollection& c, std::size_t num_clients) {
  if (c.graph_props.empty()) throw Error(ErrorCode::kMissingProps, "collection has no graph_props");
  check_clients(num_clients, c.graphs.size(), "graphs");
  std::vector<std::size_t> order(c.graphs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return c.graph_props[a] < c.graph_props[b];
  });
  FederatedDataset ds;
  ds.manifest = make_manifest("instance_space", nlohmann::ordered_json::object(), 0, num_clients,
                              fingerprint(c));
  ds.collections.resize(num_clients);
  ds.source_ids.resize(num_clients);
  std::size_t pos = 0;
  const auto sizes = segment_sizes(order.size(), num_clients);
  for (std::size_t k = 0; k < num_clients; ++k) {
    for (std::size_t i = 0; i < sizes[k]; ++i, ++pos) {
      const std::size_t src = order[pos];
      ds.collections[k].graphs.push_back(c.graphs[src]);
      ds.collections[k].graph_labels.push_back(c.graph_labels[src]);
      ds.collections[k].graph_props.push_back(c.graph_props[src]);
      ds.source_ids[k].push_back(static_cast<NodeId>(src));
    }
  }
  return ds;
}

NodeMasks stratified_masks(std::span<const int> labels, double train_ratio, double valid_ratio,
                           Rng& rng) {
  const std::size_t n = labels.size();
  NodeMasks masks;
  masks.train.assign(n, 0);
  masks.valid.assign(n, 0);
  masks.test.assign(n, 0);
  std::map<int, std::vector<NodeId>> by_class;
  for (NodeId u = 0; u < n; ++u) {
    if (labels[u] != kUnlabeled) by_class[labels[u]].push_back(u);
  }
  for (auto& [label, nodes] : by_class) {
    rng.shuffle(nodes);
    const auto count = static_cast<double>(nodes.size());
    const auto n_train = static_cast<std::size_t>(std::floor(train_ratio * count));
    const auto n_valid = static_cast<std::size_t>(std::floor(valid_ratio * count));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (i < n_train) {
        masks.train[nodes[i]] = 1;
      } else if (i < n_train + n_valid) {
        masks.valid[nodes[i]] = 1;
      } else {
        masks.test[nodes[i]] = 1;
      }
    }
  }
  return masks;
}

FederatedDataset split_from_manifest(const Graph& g, const Manifest& m) {
  const auto& cfg = m.config;
  try {
    if (m.splitter == "random") {
      RandomSplitOptions opt;
      opt.overlap = cfg.value("overlap", false);
      opt.overlap_frac = cfg.value("overlap_frac", 0.1);
      opt.drop_edge_frac = cfg.value("drop_edge_frac", 0.0);
      return random_splitter(g, m.num_clients, opt, m.seed);
    }
    if (m.splitter == "community") return community_splitter(g, m.num_clients, m.seed);
    if (m.splitter == "attribute") {
      return attribute_splitter(g, cfg.at("attr").get<std::string>(), m.num_clients);
    }
    if (m.splitter == "label_space") {
      return label_space_splitter(g, m.num_clients, cfg.at("alpha").get<double>(), m.seed);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, "manifest config: " + std::string(e.what()));
  }
  throw Error(ErrorCode::kConfigError, "splitter \"" + m.splitter + "\" does not apply to a single graph");
}

FederatedDataset split_from_manifest(const GraphCollection& c, const Manifest& m) {
  try {
    if (m.splitter == "label_space") {
      return label_space_splitter(c, m.num_clients, m.config.at("alpha").get<double>(), m.seed);
    }
    if (m.splitter == "instance_space") return instance_space_splitter(c, m.num_clients);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, "manifest config: " + std::string(e.what()));
  }
  throw Error(ErrorCode::kConfigError, "splitter \"" + m.splitter + "\" does not apply to a collection");
}

}  // namespace fedgraph::datazoo
