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

#include "fedgraph/algos/personalization.hpp"

#include <fnmatch.h>

#include "fedgraph/common/error.hpp"

namespace fedgraph::algos {

PersonalizationSpec PersonalizationSpec::parse(const std::vector<std::string>& rules) {
  PersonalizationSpec spec;
  spec.rules.clear();
  for (const auto& text : rules) {
    const auto arrow = text.rfind("->");
    if (arrow == std::string::npos || arrow == 0) {
      throw Error(ErrorCode::kConfigError, "personalization rule \"" + text + "\" is not pattern->scope");
    }
    const std::string scope = text.substr(arrow + 2);
    PersonalizationRule rule{text.substr(0, arrow), Scope::kShared};
    if (scope == "local") {
      rule.scope = Scope::kLocal;
    } else if (scope != "shared") {
      throw Error(ErrorCode::kConfigError, "personalization scope \"" + scope + "\" is not shared|local");
    }
    spec.rules.push_back(std::move(rule));
  }
  return spec;
}

std::vector<std::string> PersonalizationSpec::to_strings() const {
  std::vector<std::string> out;
  for (const auto& r : rules) out.push_back(r.pattern + (r.scope == Scope::kLocal ? "->local" : "->shared"));
  return out;
}

Scope PersonalizationSpec::scope_of(std::string_view name) const {
  const std::string n(name);
  for (const auto& r : rules) {
    if (fnmatch(r.pattern.c_str(), n.c_str(), 0) == 0) return r.scope;
  }
  throw Error(ErrorCode::kUncoveredName, "no personalization rule matches \"" + n + "\"");
}

SplitParams split_shared_local(const NamedTensorMap& params, const PersonalizationSpec& spec) {
  SplitParams out;
  for (const auto& [name, t] : params) {
    (spec.scope_of(name) == Scope::kLocal ? out.local : out.shared).emplace(name, t);
  }
  return out;
}

}  // namespace fedgraph::algos
