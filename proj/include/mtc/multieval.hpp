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

#ifndef MTC_MULTIEVAL_HPP
#define MTC_MULTIEVAL_HPP

#include <cstdint>
#include <vector>

#include "mtc/diagram.hpp"
#include "mtc/plan.hpp"

namespace mtc {

struct EvalOptions {
  std::uint64_t memory_cap_bytes = 0;  // 0 = unlimited
  int workers = 1;                     // slice parallelism only
};

/// Per-request contraction results plus instrumentation. values[i] is an
/// order-0 tensor (one amplitude) or an order-w tensor over the batch legs.
/// peak_bytes is the maximum resident tensor memory observed (per executor
/// for sliced runs). node_contractions[n] counts the pairwise contractions
/// performed at plan node n; the counters cover contraction arithmetic only.
struct EvalResult {
  std::vector<Tensor> values;
  OpCounters counters;
  std::uint64_t peak_bytes = 0;
  std::vector<std::uint64_t> node_contractions;
};

/// Shape-only replay: exact operation counts and exact peak bytes, with no
/// tensor data allocated.
struct EmulateResult {
  OpCounters counters;
  std::uint64_t peak_bytes = 0;
  std::vector<std::uint64_t> node_contractions;
};

/// Reference implementation: evaluates every request tuple recursively with
/// a single unbounded cache keyed by (subexpression, index tuple).
EvalResult eval_naive(const Plan& plan, const NetworkDiagram& d,
                      const AssignmentSet& as, const EvalOptions& opts = {});

/// The cached multi-tensor contraction. Requests are deduplicated and
/// sorted lexicographically; right subtrees are materialized whole into the
/// right cache by nested multi-tensor runs, left results are kept only while
/// the next request reuses them (at most one entry per subexpression), and
/// right dictionaries are dropped at each subexpression's last use. Requires
/// an empty slice list.
EvalResult eval_all(const Plan& plan, const NetworkDiagram& d,
                    const AssignmentSet& as, const EvalOptions& opts = {});

/// Runs eval_all once per value tuple of the sliced legs on the projected
/// network and sums the per-request results in slice-index order. Slices are
/// distributed over opts.workers executors; results are bit-identical for
/// any worker count. Requires a non-empty slice list without output legs.
EvalResult eval_sliced(const Plan& plan, const NetworkDiagram& d,
                       const AssignmentSet& as, const EvalOptions& opts = {});

/// Replays eval_all (or the slice loop when the plan has sliced legs) on
/// shapes only.
EmulateResult emulate(const Plan& plan, const NetworkDiagram& d,
                      const AssignmentSet& as, const EvalOptions& opts = {});

}  // namespace mtc

#endif  // MTC_MULTIEVAL_HPP
