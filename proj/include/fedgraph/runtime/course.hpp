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

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fedgraph/algos/aggregate.hpp"
#include "fedgraph/algos/local_update.hpp"
#include "fedgraph/algos/personalization.hpp"
#include "fedgraph/common/rng.hpp"
#include "fedgraph/monitor/monitor.hpp"
#include "fedgraph/nn/model.hpp"
#include "fedgraph/runtime/handlers.hpp"
#include "json.hpp"

namespace fedgraph::runtime {

struct FederationConfig {
  std::uint32_t num_clients = 1;        // N
  std::uint32_t clients_per_round = 1;  // K
  std::uint64_t total_rounds = 1;       // T
  std::uint64_t eval_every = 1;

  void validate() const;
};

// Everything both sides need to agree on for one FL course.
struct CourseConfig {
  nn::ModelSpec model;
  algos::LocalTrainConfig train;
  algos::AggregatorState aggregator;  // kind and hyperparameters; velocity starts empty
  algos::PersonalizationSpec personalization;
  FederationConfig federation;
  std::uint64_t seed = 0;
  bool monitor = true;  // clients ship first-step gradients for B / covariance

  void validate() const;
};

// RNG streams: the server samples from stream 0, client i trains with stream
// i, and every participant initialises the model from one shared stream.
Rng server_rng(std::uint64_t seed);
Rng client_rng(std::uint64_t seed, ParticipantId id);
Rng model_init_rng(std::uint64_t seed);

// Sample-count weighted evaluation over all clients.
struct EvalSummary {
  std::uint64_t round = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
  double test_loss = 0.0;
  double test_acc = 0.0;

  friend bool operator==(const EvalSummary&, const EvalSummary&) = default;
};
nlohmann::ordered_json to_json(const EvalSummary& s);

struct ServerState {
  std::uint64_t round = 0;
  NamedTensorMap global;
  algos::AggregatorState aggregator;
  std::vector<std::uint64_t> rng;
  std::optional<EvalSummary> best;
};

struct ClientState {
  ParticipantId id = 0;
  std::vector<std::uint64_t> rng;
  NamedTensorMap local_params;
};

struct CourseState {
  ServerState server;
  std::vector<ClientState> clients;  // ascending id
};

struct RunReport {
  std::uint64_t start_round = 0;
  std::uint64_t end_round = 0;
  std::optional<EvalSummary> final;
  std::optional<EvalSummary> best;
  std::vector<monitor::RoundRecord> records;
  std::vector<std::string> notes;  // dropped or unexpected messages

  std::uint64_t rounds_run() const { return end_round - start_round; }
};
nlohmann::ordered_json to_json(const RunReport& r);

class Server : public Participant {
 public:
  explicit Server(CourseConfig cfg);

  ParticipantId id() const override { return kServerId; }
  bool finished() const override { return finished_; }

  // The session ends once this many rounds have completed (default T).
  void set_stop_round(std::uint64_t round);
  void set_log(monitor::RoundLog* log) { log_ = log; }

  ServerState state() const;
  void restore(const ServerState& s);

  const NamedTensorMap& global() const { return global_; }
  std::uint64_t round() const { return round_; }
  std::uint32_t num_clients() const { return cfg_.federation.num_clients; }
  const RunReport& report() const { return report_; }
  // What the server is waiting for, for deadlock diagnostics.
  std::string pending() const;

 private:
  enum class Phase { kJoining, kTraining, kEvaluating, kDone };

  void on_join(const Message& m, Context& ctx);
  void on_model_update(const Message& m, Context& ctx);
  void on_metrics(const Message& m, Context& ctx);
  void start_round(Context& ctx);
  void complete_round(Context& ctx);
  void finish(Context& ctx);
  void drop(const Message& m, const std::string& why);

  CourseConfig cfg_;
  NamedTensorMap global_;
  algos::AggregatorState aggregator_;
  Rng rng_;
  std::uint64_t round_ = 0;
  std::uint64_t stop_round_ = 0;
  std::optional<EvalSummary> best_;
  Phase phase_ = Phase::kJoining;
  bool finished_ = false;

  std::set<ParticipantId> joined_;
  std::set<ParticipantId> waiting_;
  std::map<ParticipantId, ParamsPayload> updates_;
  std::map<ParticipantId, Scalars> metrics_;
  monitor::RoundRecord record_;
  std::chrono::steady_clock::time_point round_start_;
  monitor::RoundLog* log_ = nullptr;
  RunReport report_;
};

// Loads a client's data once its id is known.
using DataLoader = std::function<algos::LocalData(ParticipantId)>;

class Client : public Participant {
 public:
  Client(CourseConfig cfg, ParticipantId requested_id, DataLoader loader);

  ParticipantId id() const override { return id_; }
  bool finished() const override { return finished_; }
  void on_start(Context& ctx) override;

  ClientState state() const;
  void restore(const ClientState& s);
  const nn::ParamStore& store() const { return store_; }

 private:
  void bind(ParticipantId id);
  void load_shared(const ParamsPayload& p);
  void on_model_para(const Message& m, Context& ctx);
  void on_evaluate(const Message& m, Context& ctx);

  CourseConfig cfg_;
  DataLoader loader_;
  ParticipantId id_ = 0;
  algos::LocalData data_;
  nn::ParamStore store_;
  Rng rng_;
  bool finished_ = false;
};

}  // namespace fedgraph::runtime
