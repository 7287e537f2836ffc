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

#include "fedgraph/tuner/runner.hpp"

#include <cmath>

#include "fedgraph/common/error.hpp"
#include "fedgraph/common/hash.hpp"
#include "fedgraph/tuner/checkpoint.hpp"

namespace fedgraph::tuner {

nlohmann::ordered_json course_config_json(const runtime::CourseConfig& c) {
  const auto& m = c.model;
  return {
      {"model",
       {{"in_dim", m.in_dim},
        {"num_classes", m.num_classes},
        {"encoder", m.encoder},
        {"kind", nn::to_string(m.kind)},
        {"gnn_dims", m.gnn_dims},
        {"k_prop", m.k_prop},
        {"gpr_alpha", m.gpr_alpha},
        {"decoder", m.decoder},
        {"dropout", m.dropout},
        {"readout", m.readout == nn::Readout::kMean ? "mean" : "none"}}},
      {"train",
       {{"local_steps", c.train.local_steps},
        {"lr", c.train.lr},
        {"weight_decay", c.train.weight_decay},
        {"prox_mu", c.train.prox_mu}}},
      {"aggregator",
       {{"kind", algos::to_string(c.aggregator.kind)},
        {"server_lr", c.aggregator.server_lr},
        {"momentum", c.aggregator.momentum}}},
      {"personalization", c.personalization.to_strings()},
      {"federation",
       {{"num_clients", c.federation.num_clients},
        {"clients_per_round", c.federation.clients_per_round},
        {"total_rounds", c.federation.total_rounds},
        {"eval_every", c.federation.eval_every}}},
      {"seed", c.seed},
      {"monitor", c.monitor},
  };
}

std::string course_hash(const runtime::CourseConfig& cfg) { return sha256_hex(course_config_json(cfg).dump()); }

RunnerResult runner_call(runtime::CourseConfig cfg, const std::vector<algos::LocalData>& data,
                         std::uint64_t budget, std::optional<double> sample_rate, std::string_view restore_from,
                         std::string config_hash) {
  if (budget < 1) throw Error(ErrorCode::kConfigError, "runner budget must be >= 1");
  if (sample_rate) {
    if (!(*sample_rate > 0.0 && *sample_rate <= 1.0)) {
      throw Error(ErrorCode::kConfigError, "client sample rate must lie in (0, 1]");
    }
    cfg.federation.clients_per_round = config::clients_for_rate(*sample_rate, cfg.federation.num_clients);
  }
  if (config_hash.empty()) config_hash = course_hash(cfg);
  runtime::Course course(cfg, data);
  if (!restore_from.empty()) course.restore(restore_checkpoint(restore_from, config_hash));
  const std::uint64_t stop = course.round() + budget;
  if (stop > cfg.federation.total_rounds) {
    throw Error(ErrorCode::kConfigError, "budget runs past total_rounds " + std::to_string(cfg.federation.total_rounds));
  }
  RunnerResult r;
  r.report = course.run(stop);
  double seconds = 0.0;
  for (const auto& rec : r.report.records) seconds += rec.wall_seconds;
  const auto& last = r.report.records.back();
  const double train_loss = last.train_loss.value_or(std::nan(""));
  const double val_acc = r.report.final ? r.report.final->val_acc : std::nan("");
  if (!std::isfinite(train_loss) || !std::isfinite(val_acc)) {
    throw Error(ErrorCode::kRunnerFailure, "course diverged by round " + std::to_string(stop));
  }
  r.metrics["val_acc"] = val_acc;
  r.metrics["test_acc"] = r.report.final->test_acc;
  r.metrics["train_loss"] = train_loss;
  r.metrics["avg_round_seconds"] = seconds / static_cast<double>(r.report.records.size());
  r.checkpoint = save_checkpoint(*course.state(), config_hash);
  return r;
}

SearchSpace SearchSpace::from_json(const nlohmann::ordered_json& j) {
  if (!j.is_object() || j.empty()) throw Error(ErrorCode::kConfigError, "search space must be a non-empty object");
  SearchSpace s;
  for (const auto& [key, values] : j.items()) {
    if (!values.is_array() || values.empty()) {
      throw Error(ErrorCode::kConfigError, "search space dimension \"" + key + "\" must be a non-empty list");
    }
    std::vector<nlohmann::json> vals;
    for (const auto& v : values) vals.push_back(nlohmann::json::parse(v.dump()));
    s.dims.emplace_back(key, std::move(vals));
  }
  return s;
}

std::size_t SearchSpace::size() const {
  std::size_t n = dims.empty() ? 0 : 1;
  for (const auto& [_, v] : dims) n *= v.size();
  return n;
}

std::vector<std::vector<std::pair<std::string, nlohmann::json>>> SearchSpace::grid() const {
  std::vector<std::vector<std::pair<std::string, nlohmann::json>>> out;
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<std::string, nlohmann::json>> point(dims.size());
    std::size_t rest = i;
    for (std::size_t d = dims.size(); d-- > 0;) {
      const auto& [key, values] = dims[d];
      point[d] = {key, values[rest % values.size()]};
      rest /= values.size();
    }
    out.push_back(std::move(point));
  }
  return out;
}

std::uint64_t sha_horizon(std::size_t n, const ShaConfig& cfg) {
  std::uint64_t budget = cfg.base_budget;
  while (n > 1) {
    n = (n + cfg.eta - 1) / cfg.eta;
    budget *= cfg.eta;
  }
  return cfg.max_budget ? std::min(budget, cfg.max_budget) : budget;
}

HpoResult hpo_run(const config::RunConfig& base, const SearchSpace& space, const datazoo::FederatedDataset& ds,
                  const HpoOptions& opt) {
  opt.sha.validate();
  HpoResult out;
  const std::uint64_t horizon = sha_horizon(space.size(), opt.sha);
  for (const auto& point : space.grid()) {
    config::RunConfig c = base;
    for (const auto& [key, value] : point) c.set(key + "=" + value.dump());
    c.set("federation.total_rounds=" + std::to_string(horizon));
    out.candidates.push_back(std::move(c));
  }
  const auto data = runtime::client_data(ds);
  std::vector<runtime::CourseConfig> courses;
  for (const auto& c : out.candidates) courses.push_back(c.course(ds));
  std::vector<std::string> checkpoints(out.candidates.size());
  std::vector<std::uint64_t> done(out.candidates.size(), 0);
  std::vector<double> last(out.candidates.size(), std::nan(""));
  TrialFn trial = [&](std::size_t id, std::uint64_t cum) {
    // A capped stage repeats the previous budget; reuse its metric.
    if (cum == done[id]) return last[id];
    auto r = runner_call(courses[id], data, cum - done[id], opt.sample_rate, checkpoints[id]);
    checkpoints[id] = std::move(r.checkpoint);
    done[id] = cum;
    last[id] = r.metrics.at("val_acc");
    return last[id];
  };
  out.sha = sha_run(out.candidates.size(), trial, opt.sha);
  return out;
}

}  // namespace fedgraph::tuner
