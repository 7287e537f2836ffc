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

#include <optional>
#include <vector>

#include "fedgraph/datazoo/dataset.hpp"
#include "fedgraph/runtime/course.hpp"
#include "fedgraph/runtime/transport.hpp"

namespace fedgraph::runtime {

// Builds node-level client data from a dataset; client i+1 gets graphs[i].
// Throws ConfigError for graph-level datasets.
std::vector<algos::LocalData> client_data(const datazoo::FederatedDataset& ds);

// An FL course run in one process. Each session starts a fresh server and
// fresh clients from the saved state, runs to the requested round and saves
// the state again, so a course can be split into sessions at any round.
class Course {
 public:
  Course(CourseConfig cfg, std::vector<algos::LocalData> data);

  const CourseConfig& config() const { return cfg_; }
  std::uint64_t round() const { return state_ ? state_->server.round : 0; }
  // Empty until the first session has run or a state was restored.
  const std::optional<CourseState>& state() const { return state_; }
  void restore(CourseState state);

  // Runs until `stop_round` rounds have completed.
  RunReport run(std::uint64_t stop_round, monitor::RoundLog* log = nullptr, const Tap& tap = {});
  // Same session over loopback TCP, server and clients on threads.
  RunReport run_tcp(std::uint64_t stop_round, monitor::RoundLog* log = nullptr);

 private:
  CourseConfig cfg_;
  std::vector<algos::LocalData> data_;
  std::optional<CourseState> state_;
};

}  // namespace fedgraph::runtime
