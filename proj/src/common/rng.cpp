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

#include "fedgraph/common/rng.hpp"

#include <sstream>

#include "fedgraph/common/error.hpp"

namespace fedgraph {

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32), 0x5eedu};
  engine_.seed(seq);
}

double Rng::uniform() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double Rng::normal() { return std::normal_distribution<double>()(engine_); }

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n <= 1) return 0;
  return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
}

double Rng::gamma(double shape) {
  return std::gamma_distribution<double>(shape, 1.0)(engine_);
}

std::vector<std::uint64_t> Rng::state() const {
  std::ostringstream out;
  out << engine_;
  std::istringstream in(out.str());
  std::vector<std::uint64_t> words;
  std::uint64_t w;
  while (in >> w) words.push_back(w);
  return words;
}

void Rng::set_state(std::span<const std::uint64_t> words) {
  std::ostringstream out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out << ' ';
    out << words[i];
  }
  std::istringstream in(out.str());
  std::mt19937_64 engine;
  in >> engine;
  if (in.fail()) {
    throw Error(ErrorCode::kCorruptCheckpoint, "rng state has " +
                                                   std::to_string(words.size()) +
                                                   " words");
  }
  engine_ = engine;
}

}  // namespace fedgraph
