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

#include "fedgraph/tuner/sha.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>

#include "fedgraph/common/error.hpp"

namespace fedgraph::tuner {

void ShaConfig::validate() const {
  if (eta < 2) throw Error(ErrorCode::kConfigError, "sha: eta must be >= 2");
  if (base_budget < 1) throw Error(ErrorCode::kConfigError, "sha: base budget must be >= 1");
  if (max_budget != 0 && max_budget < base_budget) {
    throw Error(ErrorCode::kConfigError, "sha: max budget below the base budget");
  }
}

ShaResult sha_run(std::size_t num_candidates, const TrialFn& trial, const ShaConfig& cfg) {
  cfg.validate();
  if (num_candidates < 2) throw Error(ErrorCode::kConfigError, "sha: need at least two candidates");
  ShaResult out;
  std::vector<std::size_t> alive(num_candidates);
  std::iota(alive.begin(), alive.end(), std::size_t{0});
  std::vector<std::uint64_t> done(num_candidates, 0);
  std::uint64_t budget = cfg.base_budget;
  bool capped = false;

  for (std::size_t stage = 0;; ++stage) {
    const std::uint64_t cum = cfg.max_budget ? std::min(budget, cfg.max_budget) : budget;
    out.stage_sizes.push_back(alive.size());
    out.stage_budgets.push_back(cum);
    const std::size_t first_row = out.trials.size();
    for (std::size_t id : alive) {
      double metric;
      try {
        metric = trial(id, cum);
      } catch (const std::exception&) {
        metric = std::numeric_limits<double>::quiet_NaN();
      }
      out.rounds_spent += cum - done[id];
      done[id] = cum;
      out.trials.push_back(TrialRow{id, stage, cum, metric, false});
    }
    if (alive.size() == 1) {
      out.trials.back().survived = true;
      out.best = alive[0];
      return out;
    }
    std::vector<std::size_t> order(alive.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto score = [&](std::size_t k) { return out.trials[first_row + k].metric; };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double ma = score(a), mb = score(b);
      if (std::isnan(ma) != std::isnan(mb)) return std::isnan(mb);
      if (std::isnan(ma)) return alive[a] < alive[b];
      if (ma != mb) return cfg.maximize ? ma > mb : ma < mb;
      return alive[a] < alive[b];
    });
    const std::size_t keep = (alive.size() + cfg.eta - 1) / cfg.eta;
    std::vector<std::size_t> next;
    for (std::size_t k = 0; k < keep; ++k) {
      out.trials[first_row + order[k]].survived = true;
      next.push_back(alive[order[k]]);
    }
    std::sort(next.begin(), next.end());
    alive = std::move(next);
    if (!capped) {
      if (budget > std::numeric_limits<std::uint64_t>::max() / cfg.eta) {
        capped = true;
      } else {
        budget *= cfg.eta;
      }
    }
  }
}

void write_trial_csv(std::ostream& out, const ShaResult& r) {
  out << "config_id,stage,cum_rounds,metric,survived\n";
  for (const auto& t : r.trials) {
    out << t.config_id << ',' << t.stage << ',' << t.cum_rounds << ',';
    if (std::isnan(t.metric)) {
      out << "nan";
    } else {
      out << std::setprecision(17) << t.metric;
    }
    out << ',' << (t.survived ? 1 : 0) << '\n';
  }
}

}  // namespace fedgraph::tuner
