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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedgraph/common/tensor.hpp"
#include "json.hpp"

namespace fedgraph::monitor {

// sqrt(sum_i p_i |g_i|^2 / |sum_i p_i g_i|^2) over the flattened tensors.
// Returns +infinity when the weighted mean gradient is zero.
double b_local_dissimilarity(std::span<const NamedTensorMap> grads, std::span<const double> weights);

struct CovarianceSummary {
  double trace = 0.0;
  double frobenius = 0.0;
};

// Trace and Frobenius norm of sum_i p_i (g_i - mean)(g_i - mean)^T, computed
// from the client Gram matrix. Needs at least two clients.
CovarianceSummary grad_covariance_summary(std::span<const NamedTensorMap> grads,
                                          std::span<const double> weights);

struct RoundRecord {
  std::uint64_t round = 0;
  double wall_seconds = 0.0;
  std::vector<std::uint32_t> sampled;
  std::map<std::uint32_t, double> client_train_loss;
  std::optional<double> train_loss;
  std::optional<double> val_loss;
  std::optional<double> val_acc;
  std::optional<double> test_loss;
  std::optional<double> test_acc;
  std::optional<double> b_dissimilarity;
  std::optional<double> grad_cov_trace;
  std::optional<double> grad_cov_frobenius;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

nlohmann::ordered_json to_json(const RoundRecord& r);
RoundRecord round_record_from_json(const nlohmann::json& j);

// "run_{timestamp}_{first 12 hex digits of the config hash}.jsonl"
std::string log_file_name(const std::string& timestamp, const std::string& config_hash);
std::string utc_timestamp();

// Append-only JSONL sink. Each record is one write(2) on an O_APPEND file.
class RoundLog {
 public:
  explicit RoundLog(const std::filesystem::path& path);
  ~RoundLog();
  RoundLog(const RoundLog&) = delete;
  RoundLog& operator=(const RoundLog&) = delete;

  // Adds a "warning" key when the round does not increase.
  void log_round(const RoundRecord& record);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  std::optional<std::uint64_t> last_round_;
};

// Reads every record of a log.
std::vector<nlohmann::json> read_log(const std::filesystem::path& path);

}  // namespace fedgraph::monitor
