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

#include <filesystem>
#include <string>
#include <string_view>

#include "fedgraph/runtime/course.hpp"
#include "json.hpp"

namespace fedgraph::tuner {

inline constexpr std::uint16_t kCheckpointVersion = 1;

// "FSGC", version u16, header length u32 (big-endian), header JSON, then the
// tensors as packed little-endian f64 in header order. Tensor names are
// "global/<param>", "velocity/<param>" and "client/<id>/<param>".
std::string save_checkpoint(const runtime::CourseState& state, const std::string& config_hash);

// Throws ConfigHashMismatch when the hash differs from `expected_hash`
// (skipped when it is empty) and CorruptCheckpoint on any format problem.
runtime::CourseState restore_checkpoint(std::string_view bytes, const std::string& expected_hash);

void save_checkpoint_file(const std::filesystem::path& path, const runtime::CourseState& state,
                          const std::string& config_hash);
runtime::CourseState restore_checkpoint_file(const std::filesystem::path& path, const std::string& expected_hash);

// Header JSON plus a per-tensor SHA-256, for inspection.
nlohmann::ordered_json describe_checkpoint(std::string_view bytes);

}  // namespace fedgraph::tuner
