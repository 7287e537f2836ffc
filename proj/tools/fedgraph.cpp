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

// fedgraph: dataset construction, FL runs, HPO sweeps, checkpoint inspection.
// Exit codes: 0 ok, 2 config error, 3 data error, 4 runtime error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "fedgraph/common/error.hpp"
#include "fedgraph/config/run_config.hpp"
#include "fedgraph/datazoo/csbm.hpp"
#include "fedgraph/datazoo/splitters.hpp"
#include "fedgraph/graph/graph_io.hpp"
#include "fedgraph/monitor/monitor.hpp"
#include "fedgraph/runtime/simulation.hpp"
#include "fedgraph/runtime/transport.hpp"
#include "fedgraph/tuner/checkpoint.hpp"
#include "fedgraph/tuner/runner.hpp"

namespace fs = std::filesystem;
using namespace fedgraph;
using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::kConfigError, what); }

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kConfig:
      return 2;
    case ErrorCategory::kData:
      return 3;
    case ErrorCategory::kRuntime:
      return 4;
  }
  return 4;
}

std::pair<std::string, std::uint16_t> host_port(const std::string& s) {
  const auto colon = s.rfind(':');
  if (colon == std::string::npos) config_error("expected host:port, got \"" + s + "\"");
  try {
    const int port = std::stoi(s.substr(colon + 1));
    if (port < 0 || port > 65535) throw std::out_of_range("port");
    return {s.substr(0, colon), static_cast<std::uint16_t>(port)};
  } catch (const std::logic_error&) {
    config_error("bad port in \"" + s + "\"");
  }
}

// ---- split ----

struct SplitArgs {
  std::string input, splitter, out, attr;
  std::size_t clients = 0;
  std::uint64_t seed = 0;
  double alpha = 1.0;
  bool overlap = false;
  double overlap_frac = 0.1;
  double drop_edge_frac = 0.0;
};

void cmd_split(const SplitArgs& a) {
  static const std::vector<std::string> known{"random", "community", "attribute", "label_space", "instance_space"};
  if (std::find(known.begin(), known.end(), a.splitter) == known.end()) {
    config_error("--splitter: unknown splitter \"" + a.splitter + "\"");
  }
  if (a.clients < 1) config_error("--clients: must be >= 1");
  const json j = [&] {
    try {
      return json::parse(read_file(a.input));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseError, a.input + ": " + e.what());
    }
  }();
  datazoo::FederatedDataset ds;
  if (j.is_object() && j.contains("graphs")) {
    const auto c = collection_from_json(j);
    if (a.splitter == "label_space") {
      ds = datazoo::label_space_splitter(c, a.clients, a.alpha, a.seed);
    } else if (a.splitter == "instance_space") {
      ds = datazoo::instance_space_splitter(c, a.clients);
    } else {
      config_error("--splitter: \"" + a.splitter + "\" needs a single graph, the input is a collection");
    }
  } else {
    const auto g = graph_from_json(j);
    if (a.splitter == "random") {
      ds = datazoo::random_splitter(g, a.clients, {a.overlap, a.overlap_frac, a.drop_edge_frac}, a.seed);
    } else if (a.splitter == "community") {
      ds = datazoo::community_splitter(g, a.clients, a.seed);
    } else if (a.splitter == "attribute") {
      if (a.attr.empty()) config_error("--attr: required by the attribute splitter");
      ds = datazoo::attribute_splitter(g, a.attr, a.clients);
    } else if (a.splitter == "label_space") {
      ds = datazoo::label_space_splitter(g, a.clients, a.alpha, a.seed);
    } else {
      config_error("--splitter: \"instance_space\" needs a graph collection");
    }
  }
  datazoo::save_dataset(ds, a.out);
  std::cout << json{{"clients", ds.num_clients()}, {"out", a.out}}.dump() << "\n";
}

// ---- gen-csbm ----

struct CsbmArgs {
  datazoo::CsbmParams p;
  std::size_t clients = 8;
  std::string out;
};

void cmd_gen_csbm(CsbmArgs a) {
  if (a.p.phi_per_client.size() != a.clients) {
    config_error("--phi: has " + std::to_string(a.p.phi_per_client.size()) + " values for " +
                 std::to_string(a.clients) + " clients");
  }
  try {
    a.p.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  const auto ds = datazoo::fedcsbm_generate(a.p);
  datazoo::save_dataset(ds, a.out);
  std::cout << json{{"clients", ds.num_clients()}, {"out", a.out}}.dump() << "\n";
}

// ---- run ----

struct RunArgs {
  std::string config, restore, transport = "memory", listen, connect;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> rounds;
  std::optional<std::uint32_t> client_id;
};

config::RunConfig load_config(const std::string& path, const std::vector<std::string>& sets) {
  auto c = config::RunConfig::load(path);
  for (const auto& s : sets) c.set(s);
  return c;
}

void cmd_run(const RunArgs& a) {
  const auto rc = load_config(a.config, a.sets);
  if (a.transport != "memory" && a.transport != "tcp") config_error("--transport: expected memory or tcp");
  if (a.transport == "memory" && (!a.listen.empty() || !a.connect.empty())) {
    config_error("--listen/--connect need --transport tcp");
  }
  const auto ds = rc.load_data();
  const auto cfg = rc.course(ds);
  const auto data = runtime::client_data(ds);
  const std::string hash = rc.hash();

  if (!a.connect.empty()) {
    // Distributed client process.
    if (!a.listen.empty()) config_error("--listen and --connect are exclusive");
    if (!a.restore.empty()) config_error("--restore is not available to a distributed client");
    const auto [host, port] = host_port(a.connect);
    const auto want = a.client_id.value_or(1);
    runtime::Client client(cfg, want, [&](runtime::ParticipantId id) {
      if (id < 1 || id > data.size()) throw Error(ErrorCode::kConfigError, "client id out of range");
      return data[id - 1];
    });
    runtime::TcpClientOptions opt;
    opt.host = host;
    opt.port = port;
    runtime::run_tcp_client(client, opt);
    std::cout << json{{"client_id", client.id()}, {"finished", client.finished()}}.dump() << "\n";
    return;
  }

  const fs::path out_dir = rc.output_dir().empty() ? fs::path(".") : rc.output_dir();
  const fs::path log_dir = rc.log_dir().empty() ? out_dir : rc.log_dir();
  fs::create_directories(out_dir);
  fs::create_directories(log_dir);
  const fs::path log_path = log_dir / monitor::log_file_name(monitor::utc_timestamp(), hash);

  if (!a.listen.empty()) {
    // Distributed server process; clients live elsewhere, so no checkpoint.
    if (!a.restore.empty()) config_error("--restore is not available to a distributed server");
    const auto [host, port] = host_port(a.listen);
    runtime::Server server(cfg);
    if (a.rounds) {
      if (*a.rounds < 1 || *a.rounds > cfg.federation.total_rounds) config_error("--rounds: out of range");
      server.set_stop_round(*a.rounds);
    }
    monitor::RoundLog log(log_path);
    server.set_log(&log);
    runtime::TcpServerOptions opt;
    opt.host = host;
    opt.port = port;
    opt.on_listening = [](std::uint16_t p) { std::cerr << "listening on port " << p << std::endl; };
    auto report = runtime::run_tcp_server(server, opt);
    auto j = runtime::to_json(report);
    j["log"] = log_path.string();
    std::cout << j.dump() << "\n";
    return;
  }

  runtime::Course course(cfg, data);
  if (!a.restore.empty()) course.restore(tuner::restore_checkpoint_file(a.restore, hash));
  const std::uint64_t start = course.round();
  const std::uint64_t stop = a.rounds ? start + *a.rounds : cfg.federation.total_rounds;
  if (a.rounds && *a.rounds < 1) config_error("--rounds: must be >= 1");
  if (stop > cfg.federation.total_rounds || stop <= start) {
    config_error("--rounds: course is at round " + std::to_string(start) + " of " +
                 std::to_string(cfg.federation.total_rounds));
  }
  monitor::RoundLog log(log_path);
  const auto report = a.transport == "tcp" ? course.run_tcp(stop, &log) : course.run(stop, &log);
  const fs::path ckpt = out_dir / ("checkpoint_r" + std::to_string(stop) + ".fsgc");
  tuner::save_checkpoint_file(ckpt, *course.state(), hash);
  auto j = runtime::to_json(report);
  j["log"] = log_path.string();
  j["checkpoint"] = ckpt.string();
  std::cout << j.dump() << "\n";
}

// ---- hpo ----

struct HpoArgs {
  std::string config, space, out;
  std::vector<std::string> sets;
  std::uint32_t eta = 2;
  std::uint64_t budget = 1;
  std::uint64_t fidelity_rounds = 1;
  std::uint64_t max_rounds = 0;
  double sample_rate = 1.0;
  std::optional<std::uint64_t> seed;
};

void cmd_hpo(const HpoArgs& a) {
  auto rc = load_config(a.config, a.sets);
  if (a.seed) rc.set("seed=" + std::to_string(*a.seed));
  const auto space = tuner::SearchSpace::from_json(nlohmann::ordered_json::parse(read_file(a.space)));
  if (space.size() < 2) config_error("--space: needs at least two configurations");
  if (a.budget < 1 || a.fidelity_rounds < 1) config_error("--budget and --fidelity-rounds must be >= 1");
  tuner::HpoOptions opt;
  opt.sha.eta = a.eta;
  opt.sha.base_budget = a.budget * a.fidelity_rounds;
  opt.sha.max_budget = a.max_rounds;
  opt.sample_rate = a.sample_rate;
  const auto ds = rc.load_data();
  const auto r = tuner::hpo_run(rc, space, ds, opt);
  const fs::path out_dir = a.out.empty() ? (rc.output_dir().empty() ? fs::path(".") : rc.output_dir()) : fs::path(a.out);
  fs::create_directories(out_dir);
  {
    std::ofstream csv(out_dir / "trials.csv");
    tuner::write_trial_csv(csv, r.sha);
    if (!csv) throw Error(ErrorCode::kIoError, "cannot write " + (out_dir / "trials.csv").string());
  }
  const auto& best = r.candidates[r.sha.best];
  write_file(out_dir / "best_config.json", best.tree().dump(2) + "\n");
  json summary{{"best_id", r.sha.best},
               {"best_config", best.tree()},
               {"stage_sizes", r.sha.stage_sizes},
               {"stage_budgets", r.sha.stage_budgets},
               {"rounds_spent", r.sha.rounds_spent},
               {"trials", (out_dir / "trials.csv").string()}};
  std::cout << summary.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fedgraph: federated graph learning engine"};
  app.require_subcommand(1);

  SplitArgs sa;
  auto* split = app.add_subcommand("split", "split a graph or graph collection into clients");
  split->add_option("--input", sa.input, "graph or collection JSON")->required();
  split->add_option("--splitter", sa.splitter, "random|community|attribute|label_space|instance_space")->required();
  split->add_option("--clients", sa.clients, "number of clients")->required();
  split->add_option("--seed", sa.seed, "split seed");
  split->add_option("--out", sa.out, "output directory")->required();
  split->add_option("--attr", sa.attr, "node attribute (attribute splitter)");
  split->add_option("--alpha", sa.alpha, "Dirichlet concentration (label_space)");
  split->add_flag("--overlap", sa.overlap, "copy some nodes into a second client (random)");
  split->add_option("--overlap-frac", sa.overlap_frac, "fraction of nodes copied (random)");
  split->add_option("--drop-edge-frac", sa.drop_edge_frac, "fraction of client edges removed (random)");

  CsbmArgs ca;
  auto* gen = app.add_subcommand("gen-csbm", "generate a FedcSBM dataset");
  gen->add_option("--clients", ca.clients, "number of clients");
  gen->add_option("--nodes", ca.p.nodes_per_client, "nodes per client");
  gen->add_option("--dim", ca.p.feature_dim, "feature dimension");
  gen->add_option("--deg", ca.p.avg_degree, "average degree");
  gen->add_option("--mu", ca.p.mu, "feature signal strength");
  gen->add_option("--phi", ca.p.phi_per_client, "per-client phi, comma separated")->required()->delimiter(',');
  gen->add_option("--lambda-max", ca.p.lambda_max, "structural signal cap (negative: default)");
  gen->add_option("--train-ratio", ca.p.train_ratio, "train fraction");
  gen->add_option("--valid-ratio", ca.p.valid_ratio, "validation fraction");
  gen->add_option("--seed", ca.p.seed, "generator seed");
  gen->add_option("--out", ca.out, "output directory")->required();

  RunArgs ra;
  auto* run = app.add_subcommand("run", "run an FL course");
  run->add_option("--config", ra.config, "run config JSON")->required();
  run->add_option("--set", ra.sets, "dotted override key=value (repeatable)");
  run->add_option("--restore", ra.restore, "checkpoint to continue from");
  run->add_option("--rounds", ra.rounds, "rounds to run in this session (default: up to total_rounds)");
  run->add_option("--transport", ra.transport, "memory|tcp");
  run->add_option("--listen", ra.listen, "host:port; run only the server and wait for clients");
  run->add_option("--connect", ra.connect, "host:port; run one client against a server");
  run->add_option("--client-id", ra.client_id, "requested client id with --connect");

  HpoArgs ha;
  auto* hpo = app.add_subcommand("hpo", "successive halving over a grid search space");
  hpo->add_option("--config", ha.config, "base run config JSON")->required();
  hpo->add_option("--set", ha.sets, "dotted override key=value (repeatable)");
  hpo->add_option("--space", ha.space, "search space JSON: {\"key\": [values...]}")->required();
  hpo->add_option("--eta", ha.eta, "elimination factor");
  hpo->add_option("--budget", ha.budget, "first-stage budget in evaluations");
  hpo->add_option("--fidelity-rounds", ha.fidelity_rounds, "FL rounds per evaluation");
  hpo->add_option("--max-rounds", ha.max_rounds, "cap on cumulative rounds per candidate (0: none)");
  hpo->add_option("--sample-rate", ha.sample_rate, "client sample rate during the sweep");
  hpo->add_option("--seed", ha.seed, "overrides the base config seed");
  hpo->add_option("--out", ha.out, "output directory for trials.csv and best_config.json");

  std::string ckpt;
  auto* inspect = app.add_subcommand("inspect-ckpt", "summarise a checkpoint file");
  inspect->add_option("--ckpt", ckpt, "checkpoint file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*split) cmd_split(sa);
    if (*gen) cmd_gen_csbm(ca);
    if (*run) cmd_run(ra);
    if (*hpo) cmd_hpo(ha);
    if (*inspect) std::cout << tuner::describe_checkpoint(read_file(ckpt)).dump(2) << "\n";
  } catch (const Error& e) {
    std::cerr << "fedgraph: " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "fedgraph: ConfigError: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "fedgraph: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
