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

#include "fedgraph/runtime/course.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fedgraph/common/error.hpp"

namespace fedgraph::runtime {
namespace {

constexpr std::uint64_t kModelInitStream = std::uint64_t{1} << 40;

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

std::string join_ids(const std::set<ParticipantId>& ids) {
  std::ostringstream out;
  out << "[";
  for (auto it = ids.begin(); it != ids.end(); ++it) out << (it == ids.begin() ? "" : ", ") << *it;
  out << "]";
  return out.str();
}

Message control(std::string_view type, ControlKind kind, std::vector<ParticipantId> to,
                std::uint64_t state, Scalars scalars = {}) {
  return Message{std::string(type), kServerId, std::move(to), state, ControlPayload{kind, std::move(scalars)}};
}

// sum(value * count) / sum(count) over clients with count > 0.
double weighted(const std::map<ParticipantId, Scalars>& all, const std::string& value,
                const std::string& count) {
  double num = 0.0, den = 0.0;
  for (const auto& [_, s] : all) {
    const double c = s.count(count) ? s.at(count) : 0.0;
    if (c <= 0.0) continue;
    num += s.at(value) * c;
    den += c;
  }
  return den > 0.0 ? num / den : nan();
}

}  // namespace

void FederationConfig::validate() const {
  if (num_clients < 1) throw Error(ErrorCode::kConfigError, "federation: need at least one client");
  if (clients_per_round < 1 || clients_per_round > num_clients) {
    throw Error(ErrorCode::kKTooLarge, "federation: clients_per_round " + std::to_string(clients_per_round) +
                                           " must lie in [1, " + std::to_string(num_clients) + "]");
  }
  if (total_rounds < 1) throw Error(ErrorCode::kConfigError, "federation.total_rounds must be >= 1");
  if (eval_every < 1) throw Error(ErrorCode::kConfigError, "federation.eval_every must be >= 1");
}

void CourseConfig::validate() const {
  model.validate();
  train.validate();
  aggregator.validate();
  federation.validate();
}

Rng server_rng(std::uint64_t seed) { return Rng(seed, 0); }
Rng client_rng(std::uint64_t seed, ParticipantId id) { return Rng(seed, id); }
Rng model_init_rng(std::uint64_t seed) { return Rng(seed, kModelInitStream); }

nlohmann::ordered_json to_json(const EvalSummary& s) {
  auto num = [](double v) -> nlohmann::ordered_json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  return {{"round", s.round},         {"train_loss", num(s.train_loss)},
          {"val_loss", num(s.val_loss)}, {"val_acc", num(s.val_acc)},
          {"test_loss", num(s.test_loss)}, {"test_acc", num(s.test_acc)}};
}

nlohmann::ordered_json to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["final"] = r.final ? to_json(*r.final) : nlohmann::ordered_json();
  j["best"] = r.best ? to_json(*r.best) : nlohmann::ordered_json();
  j["rounds_run"] = r.rounds_run();
  j["start_round"] = r.start_round;
  j["end_round"] = r.end_round;
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

// ---------------------------------------------------------------- Server

Server::Server(CourseConfig cfg) : cfg_(std::move(cfg)), rng_(server_rng(cfg_.seed)) {
  cfg_.validate();
  aggregator_ = cfg_.aggregator;
  aggregator_.velocity.clear();
  Rng init = model_init_rng(cfg_.seed);
  auto store = nn::init_params(cfg_.model, init);
  global_ = algos::split_shared_local(store.params(), cfg_.personalization).shared;
  stop_round_ = cfg_.federation.total_rounds;

  handlers().register_handler(msg::kJoin, [this](const Message& m, Context& c) { on_join(m, c); });
  handlers().register_handler(msg::kModelUpdate,
                              [this](const Message& m, Context& c) { on_model_update(m, c); });
  handlers().register_handler(msg::kMetrics, [this](const Message& m, Context& c) { on_metrics(m, c); });
}

void Server::set_stop_round(std::uint64_t round) {
  if (round > cfg_.federation.total_rounds) {
    throw Error(ErrorCode::kConfigError, "stop round " + std::to_string(round) + " exceeds total_rounds " +
                                             std::to_string(cfg_.federation.total_rounds));
  }
  stop_round_ = round;
}

ServerState Server::state() const {
  return ServerState{round_, global_, aggregator_, rng_.state(), best_};
}

void Server::restore(const ServerState& s) {
  if (!congruent(s.global, global_)) {
    throw Error(ErrorCode::kCorruptCheckpoint, "checkpointed global model does not match the model spec");
  }
  if (s.round > cfg_.federation.total_rounds) {
    throw Error(ErrorCode::kCorruptCheckpoint, "checkpoint round exceeds total_rounds");
  }
  round_ = s.round;
  global_ = s.global;
  aggregator_ = s.aggregator;
  rng_.set_state(s.rng);
  best_ = s.best;
  report_.start_round = report_.end_round = round_;
  report_.best = best_;
}

std::string Server::pending() const {
  std::ostringstream out;
  out << "round " << round_ << ": ";
  switch (phase_) {
    case Phase::kJoining:
      out << "waiting for join (" << joined_.size() << " of " << cfg_.federation.num_clients << " joined)";
      break;
    case Phase::kTraining:
      out << "waiting for model_update from " << join_ids(waiting_);
      break;
    case Phase::kEvaluating:
      out << "waiting for metrics from " << join_ids(waiting_);
      break;
    case Phase::kDone:
      out << "finished";
      break;
  }
  return out.str();
}

void Server::drop(const Message& m, const std::string& why) {
  report_.notes.push_back("dropped " + m.msg_type + " from " + std::to_string(m.sender) + " (state " +
                          std::to_string(m.state) + "): " + why);
}

void Server::on_join(const Message& m, Context& ctx) {
  if (phase_ != Phase::kJoining || m.sender == kServerId || m.sender > cfg_.federation.num_clients ||
      !joined_.insert(m.sender).second) {
    drop(m, "unexpected join");
    return;
  }
  ctx.send(control(msg::kAssignId, ControlKind::kAssignId, {m.sender}, round_,
                   {{"id", static_cast<double>(m.sender)}}));
  if (joined_.size() < cfg_.federation.num_clients) return;
  report_.start_round = report_.end_round = round_;
  if (round_ >= stop_round_) {
    finish(ctx);
  } else {
    start_round(ctx);
  }
}

void Server::start_round(Context& ctx) {
  phase_ = Phase::kTraining;
  round_start_ = std::chrono::steady_clock::now();
  auto sampled = algos::sample_clients(cfg_.federation.num_clients, cfg_.federation.clients_per_round, rng_);
  waiting_ = std::set<ParticipantId>(sampled.begin(), sampled.end());
  updates_.clear();
  record_ = monitor::RoundRecord{};
  record_.sampled = sampled;
  ctx.send(Message{std::string(msg::kModelPara), kServerId, sampled, round_, ParamsPayload{global_, 1, {}}});
}

void Server::on_model_update(const Message& m, Context& ctx) {
  if (m.state < round_) {
    drop(m, "stale, server is at round " + std::to_string(round_));
    return;
  }
  const auto* p = std::get_if<ParamsPayload>(&m.payload);
  if (phase_ != Phase::kTraining || m.state != round_ || p == nullptr || !waiting_.count(m.sender)) {
    drop(m, "unexpected update");
    return;
  }
  waiting_.erase(m.sender);
  updates_.emplace(m.sender, *p);
  if (!waiting_.empty()) return;

  std::vector<algos::WeightedParams> ups;
  std::vector<NamedTensorMap> grads;
  std::vector<double> weights;
  double total = 0.0;
  for (auto& [id, u] : updates_) {
    algos::WeightedParams w;
    w.sample_count = u.sample_count;
    NamedTensorMap g;
    for (auto& [name, t] : u.tensors) {
      if (name.starts_with(kGradPrefix)) {
        g.emplace(name.substr(kGradPrefix.size()), std::move(t));
      } else {
        w.params.emplace(name, std::move(t));
      }
    }
    total += static_cast<double>(u.sample_count);
    auto loss = u.scalars.find("train_loss");
    record_.client_train_loss[id] = loss == u.scalars.end() ? nan() : loss->second;
    grads.push_back(std::move(g));
    ups.push_back(std::move(w));
  }
  double train_loss = 0.0;
  for (const auto& u : ups) weights.push_back(static_cast<double>(u.sample_count) / total);
  {
    std::size_t i = 0;
    for (const auto& [id, loss] : record_.client_train_loss) train_loss += weights[i++] * loss;
  }
  record_.train_loss = train_loss;

  if (cfg_.monitor && !grads.empty() && !grads[0].empty()) {
    const double b = monitor::b_local_dissimilarity(grads, weights);
    if (std::isfinite(b) && b < 1.0 - 1e-9) {
      throw Error(ErrorCode::kInvariantViolation, "B-local dissimilarity " + std::to_string(b) + " < 1");
    }
    record_.b_dissimilarity = b;
    if (grads.size() >= 2) {
      auto cov = monitor::grad_covariance_summary(grads, weights);
      record_.grad_cov_trace = cov.trace;
      record_.grad_cov_frobenius = cov.frobenius;
    }
  }

  global_ = algos::aggregate(aggregator_, global_, ups);
  ++round_;
  record_.round = round_;
  report_.end_round = round_;

  const auto& f = cfg_.federation;
  if (round_ % f.eval_every == 0 || round_ == f.total_rounds || round_ == stop_round_) {
    phase_ = Phase::kEvaluating;
    metrics_.clear();
    waiting_.clear();
    for (ParticipantId id = 1; id <= f.num_clients; ++id) waiting_.insert(id);
    ctx.send(Message{std::string(msg::kEvaluate), kServerId, {}, round_, ParamsPayload{global_, 1, {}}});
  } else {
    complete_round(ctx);
  }
}

void Server::on_metrics(const Message& m, Context& ctx) {
  const auto* p = std::get_if<MetricsPayload>(&m.payload);
  if (phase_ != Phase::kEvaluating || m.state != round_ || p == nullptr || !waiting_.count(m.sender)) {
    drop(m, "unexpected metrics");
    return;
  }
  waiting_.erase(m.sender);
  metrics_.emplace(m.sender, p->values);
  if (!waiting_.empty()) return;

  EvalSummary s;
  s.round = round_;
  s.train_loss = weighted(metrics_, "train_loss", "train_count");
  s.val_loss = weighted(metrics_, "val_loss", "val_count");
  s.val_acc = weighted(metrics_, "val_acc", "val_count");
  s.test_loss = weighted(metrics_, "test_loss", "test_count");
  s.test_acc = weighted(metrics_, "test_acc", "test_count");
  record_.val_loss = s.val_loss;
  record_.val_acc = s.val_acc;
  record_.test_loss = s.test_loss;
  record_.test_acc = s.test_acc;
  report_.final = s;
  if (!best_ || s.val_acc > best_->val_acc) best_ = s;
  report_.best = best_;
  complete_round(ctx);
}

void Server::complete_round(Context& ctx) {
  record_.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - round_start_).count();
  report_.records.push_back(record_);
  if (log_ != nullptr) log_->log_round(record_);
  if (round_ >= stop_round_) {
    finish(ctx);
  } else {
    start_round(ctx);
  }
}

void Server::finish(Context& ctx) {
  phase_ = Phase::kDone;
  waiting_.clear();
  ctx.send(control(msg::kFinish, ControlKind::kFinish, {}, round_));
  finished_ = true;
}

// ---------------------------------------------------------------- Client

Client::Client(CourseConfig cfg, ParticipantId requested_id, DataLoader loader)
    : cfg_(std::move(cfg)), loader_(std::move(loader)) {
  cfg_.validate();
  bind(requested_id);
  handlers().register_handler(msg::kAssignId, [this](const Message& m, Context&) {
    const auto& c = std::get<ControlPayload>(m.payload);
    auto it = c.scalars.find("id");
    if (it == c.scalars.end()) throw Error(ErrorCode::kMalformedFrame, "assign_id without an id");
    const auto assigned = static_cast<ParticipantId>(it->second);
    if (assigned != id_) bind(assigned);
  });
  handlers().register_handler(msg::kModelPara, [this](const Message& m, Context& c) { on_model_para(m, c); });
  handlers().register_handler(msg::kEvaluate, [this](const Message& m, Context& c) { on_evaluate(m, c); });
  handlers().register_handler(msg::kFinish, [this](const Message&, Context&) { finished_ = true; });
}

void Client::bind(ParticipantId id) {
  if (id == kServerId || id > cfg_.federation.num_clients) {
    throw Error(ErrorCode::kConfigError, "client id " + std::to_string(id) + " outside [1, " +
                                             std::to_string(cfg_.federation.num_clients) + "]");
  }
  id_ = id;
  data_ = loader_(id);
  if (data_.features.cols() != cfg_.model.in_dim) {
    throw Error(ErrorCode::kShapeMismatch, "client " + std::to_string(id) + " has feature width " +
                                               std::to_string(data_.features.cols()) + ", model expects " +
                                               std::to_string(cfg_.model.in_dim));
  }
  Rng init = model_init_rng(cfg_.seed);
  store_ = nn::init_params(cfg_.model, init);
  rng_ = client_rng(cfg_.seed, id);
}

void Client::on_start(Context& ctx) {
  ctx.send(Message{std::string(msg::kJoin), id_, {kServerId}, 0, ControlPayload{ControlKind::kJoin, {}}});
}

ClientState Client::state() const {
  return ClientState{id_, rng_.state(),
                     algos::split_shared_local(store_.params(), cfg_.personalization).local};
}

void Client::restore(const ClientState& s) {
  if (s.id != id_) bind(s.id);
  auto& params = store_.mutable_params();
  for (const auto& [name, t] : s.local_params) {
    auto it = params.find(name);
    if (it == params.end() || !it->second.same_shape(t)) {
      throw Error(ErrorCode::kCorruptCheckpoint, "client " + std::to_string(s.id) + " local tensor \"" + name +
                                                     "\" does not match the model");
    }
    it->second = t;
  }
  rng_.set_state(s.rng);
}

void Client::load_shared(const ParamsPayload& p) {
  auto& params = store_.mutable_params();
  for (const auto& [name, t] : p.tensors) {
    auto it = params.find(name);
    if (it == params.end() || !it->second.same_shape(t)) {
      throw Error(ErrorCode::kShapeMismatch, "received tensor \"" + name + "\" does not match the model");
    }
    it->second = t;
  }
}

void Client::on_model_para(const Message& m, Context& ctx) {
  const auto& p = std::get<ParamsPayload>(m.payload);
  load_shared(p);
  NamedTensorMap grads;
  if (cfg_.monitor) grads = algos::local_gradient(store_, cfg_.model, data_);
  auto result = algos::local_update(store_, cfg_.model, cfg_.train, data_, p.tensors, rng_);
  ParamsPayload out;
  out.sample_count = result.train_count;
  out.scalars["train_loss"] = result.train_loss;
  out.tensors = algos::split_shared_local(result.params, cfg_.personalization).shared;
  if (cfg_.monitor) {
    for (const auto& [name, _] : p.tensors) {
      out.tensors.emplace(std::string(kGradPrefix) + name, grads.at(name));
    }
  }
  ctx.send(Message{std::string(msg::kModelUpdate), id_, {kServerId}, m.state, std::move(out)});
}

void Client::on_evaluate(const Message& m, Context& ctx) {
  load_shared(std::get<ParamsPayload>(m.payload));
  Scalars v;
  auto put = [&](const std::string& split, const std::vector<std::uint8_t>& mask) {
    auto r = algos::evaluate_split(cfg_.model, store_, data_, mask);
    v[split + "_count"] = static_cast<double>(r.count);
    v[split + "_loss"] = r.count ? r.loss : 0.0;
    v[split + "_acc"] = r.count ? r.acc : 0.0;
  };
  put("train", data_.masks.train);
  put("val", data_.masks.valid);
  put("test", data_.masks.test);
  ctx.send(Message{std::string(msg::kMetrics), id_, {kServerId}, m.state, MetricsPayload{std::move(v)}});
}

}  // namespace fedgraph::runtime
