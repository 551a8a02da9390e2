// Copyright 2026 The mtc Authors
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

#ifndef MTC_OPTIMIZER_HPP
#define MTC_OPTIMIZER_HPP

#include <cstdint>

#include "mtc/plan.hpp"
#include "mtc/rng.hpp"

namespace mtc {

struct SearchConfig {
  std::uint64_t steps = 1'000'000;
  double temp_init = 2.0;
  double temp_final = 0.01;
  double decay = 0.0;  // geometric factor per step; 0 derives it from temps
  std::uint64_t slice_interval = 100'000;  // slicing move every K steps
  std::uint64_t seed = 0;
  std::uint32_t chains = 1;
};

/// Applies one rewrite rule to a plan and returns the rewritten plan. The
/// contracted value is unchanged (the rules only reassociate and commute).
/// Throws DataError when the node does not match the rule's pattern.
Plan local_transform(const Plan& p, int node, int rule);

/// The periodic slicing update: a fair coin picks add-or-remove. Add scans
/// every closed unsliced leg and slices the one with the best
/// memory-estimate reduction (ties: smallest leg id); remove drops a random
/// sliced leg and is a no-op when the slice list is empty.
void slicing_move(CostedPlan& cp, Rng& rng);

struct AnnealResult {
  Plan plan;
  double objective = 0.0;
  u128 total_cost = 0;
  u128 total_rw = 0;
  double memory_estimate_bytes = 0.0;
};

/// Simulated annealing over contraction trees, starting from the left-deep
/// chain in slot order. Each step proposes a uniformly random applicable
/// (node, rule) pair and accepts with probability min(1, exp(gain/temp));
/// every slice_interval steps a slicing move is applied. Runs sc.chains
/// independent chains and returns the best plan seen (ties: lowest chain).
/// Deterministic for a fixed seed and configuration.
AnnealResult anneal(const NetworkDiagram& d, const ValueCounts& counts,
                    const CostConfig& cfg, const SearchConfig& sc);

}  // namespace mtc

#endif  // MTC_OPTIMIZER_HPP
