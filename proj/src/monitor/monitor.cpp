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

#include "fedgraph/monitor/monitor.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <ctime>
#include <fstream>
#include <limits>

#include "fedgraph/common/error.hpp"

namespace fedgraph::monitor {
namespace {

std::vector<std::vector<double>> flatten_all(std::span<const NamedTensorMap> grads,
                                             std::span<const double> weights) {
  if (grads.size() != weights.size()) {
    throw Error(ErrorCode::kShapeMismatch, "gradient and weight counts differ");
  }
  double total = 0.0;
  for (double p : weights) total += p;
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidParams, "weights sum to " + std::to_string(total) + ", not 1");
  }
  std::vector<std::vector<double>> flat;
  for (const auto& g : grads) {
    if (!congruent(g, grads[0])) throw Error(ErrorCode::kShapeMismatch, "client gradients differ in shape");
    flat.push_back(flatten(g));
  }
  return flat;
}

std::vector<double> weighted_mean(const std::vector<std::vector<double>>& flat,
                                  std::span<const double> weights) {
  std::vector<double> mean(flat.empty() ? 0 : flat[0].size(), 0.0);
  for (std::size_t i = 0; i < flat.size(); ++i) {
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += weights[i] * flat[i][j];
  }
  return mean;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <typename T>
void put_optional(nlohmann::ordered_json& j, const char* key, const std::optional<T>& v) {
  if (v && std::isfinite(*v)) {
    j[key] = *v;
  } else {
    j[key] = nullptr;
  }
}

std::optional<double> get_optional(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

double b_local_dissimilarity(std::span<const NamedTensorMap> grads, std::span<const double> weights) {
  if (grads.empty()) throw Error(ErrorCode::kTooFewClients, "no gradients");
  auto flat = flatten_all(grads, weights);
  double num = 0.0;
  for (std::size_t i = 0; i < flat.size(); ++i) num += weights[i] * dot(flat[i], flat[i]);
  auto mean = weighted_mean(flat, weights);
  const double den = dot(mean, mean);
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

CovarianceSummary grad_covariance_summary(std::span<const NamedTensorMap> grads,
                                          std::span<const double> weights) {
  if (grads.size() < 2) throw Error(ErrorCode::kTooFewClients, "covariance needs at least two clients");
  auto flat = flatten_all(grads, weights);
  auto mean = weighted_mean(flat, weights);
  for (auto& g : flat) {
    for (std::size_t j = 0; j < g.size(); ++j) g[j] -= mean[j];
  }
  CovarianceSummary out;
  double frob2 = 0.0;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    for (std::size_t k = i; k < flat.size(); ++k) {
      const double gik = std::sqrt(weights[i] * weights[k]) * dot(flat[i], flat[k]);
      if (i == k) {
        out.trace += gik;
        frob2 += gik * gik;
      } else {
        frob2 += 2.0 * gik * gik;
      }
    }
  }
  out.frobenius = std::sqrt(frob2);
  return out;
}

nlohmann::ordered_json to_json(const RoundRecord& r) {
  nlohmann::ordered_json j;
  j["round"] = r.round;
  j["wall_seconds"] = r.wall_seconds;
  j["sampled"] = r.sampled;
  nlohmann::ordered_json losses = nlohmann::ordered_json::object();
  for (const auto& [id, loss] : r.client_train_loss) losses[std::to_string(id)] = loss;
  j["client_train_loss"] = std::move(losses);
  put_optional(j, "train_loss", r.train_loss);
  put_optional(j, "val_loss", r.val_loss);
  put_optional(j, "val_acc", r.val_acc);
  put_optional(j, "test_loss", r.test_loss);
  put_optional(j, "test_acc", r.test_acc);
  put_optional(j, "b_dissimilarity", r.b_dissimilarity);
  put_optional(j, "grad_cov_trace", r.grad_cov_trace);
  put_optional(j, "grad_cov_frobenius", r.grad_cov_frobenius);
  return j;
}

RoundRecord round_record_from_json(const nlohmann::json& j) {
  RoundRecord r;
  try {
    r.round = j.at("round").get<std::uint64_t>();
    r.wall_seconds = j.at("wall_seconds").get<double>();
    r.sampled = j.at("sampled").get<std::vector<std::uint32_t>>();
    for (const auto& [id, loss] : j.at("client_train_loss").items()) {
      r.client_train_loss[static_cast<std::uint32_t>(std::stoul(id))] = loss.get<double>();
    }
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("round record: ") + e.what());
  }
  r.train_loss = get_optional(j, "train_loss");
  r.val_loss = get_optional(j, "val_loss");
  r.val_acc = get_optional(j, "val_acc");
  r.test_loss = get_optional(j, "test_loss");
  r.test_acc = get_optional(j, "test_acc");
  r.b_dissimilarity = get_optional(j, "b_dissimilarity");
  r.grad_cov_trace = get_optional(j, "grad_cov_trace");
  r.grad_cov_frobenius = get_optional(j, "grad_cov_frobenius");
  return r;
}

std::string log_file_name(const std::string& timestamp, const std::string& config_hash) {
  return "run_" + timestamp + "_" + config_hash.substr(0, 12) + ".jsonl";
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

RoundLog::RoundLog(const std::filesystem::path& path) : path_(path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error(ErrorCode::kIoError, "cannot open log " + path.string() + ": " + std::strerror(errno));
}

RoundLog::~RoundLog() {
  if (fd_ >= 0) ::close(fd_);
}

void RoundLog::log_round(const RoundRecord& record) {
  auto j = to_json(record);
  if (last_round_ && record.round <= *last_round_) {
    j["warning"] = "round " + std::to_string(record.round) + " does not follow round " +
                   std::to_string(*last_round_);
  }
  last_round_ = std::max(record.round, last_round_.value_or(0));
  const std::string line = j.dump() + "\n";
  const ssize_t n = ::write(fd_, line.data(), line.size());
  if (n != static_cast<ssize_t>(line.size())) {
    throw Error(ErrorCode::kIoError, "short write to " + path_.string());
  }
}

std::vector<nlohmann::json> read_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::vector<nlohmann::json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace fedgraph::monitor
