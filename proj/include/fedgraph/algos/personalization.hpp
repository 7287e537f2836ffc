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

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fedgraph/common/tensor.hpp"

namespace fedgraph::algos {

enum class Scope { kShared, kLocal };

struct PersonalizationRule {
  std::string pattern;  // shell-style glob over parameter names
  Scope scope = Scope::kShared;
};

// Ordered rules; the first matching rule decides a parameter's scope.
struct PersonalizationSpec {
  std::vector<PersonalizationRule> rules{{"*", Scope::kShared}};

  // Parses "pattern->shared" / "pattern->local".
  static PersonalizationSpec parse(const std::vector<std::string>& rules);
  std::vector<std::string> to_strings() const;

  // Throws UncoveredName when no rule matches.
  Scope scope_of(std::string_view name) const;
};

struct SplitParams {
  NamedTensorMap shared;
  NamedTensorMap local;
};

SplitParams split_shared_local(const NamedTensorMap& params, const PersonalizationSpec& spec);

}  // namespace fedgraph::algos
