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

#ifndef MTC_PLAN_HPP
#define MTC_PLAN_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtc/diagram.hpp"

namespace mtc {

using u128 = unsigned __int128;
using i128 = __int128;

/// Binary contraction tree over diagram slots plus the list of sliced legs.
/// Leaves carry slot indices (each slot exactly once); internal nodes are
/// pairwise contractions.
struct Plan {
  struct Node {
    int left = -1;
    int right = -1;
    int slot = -1;
    bool leaf() const { return slot >= 0; }
  };
  std::vector<Node> nodes;
  int root = -1;
  std::vector<LegId> sliced;

  std::size_t leaf_count() const;
};

/// Text form. Line 1 is the tree as a parenthesized s-expression over slot
/// indices with the root's outer parentheses omitted (a lone leaf is written
/// "(j)"); adjacent items associate to the left. Line 2 is "slice:" followed
/// by the sliced leg ids.
std::string format_plan(const Plan& p);
Plan parse_plan(const std::string& text);
Plan parse_plan_file(const std::string& path);

/// ((((0 1) 2) 3) ...) over all slots; the annealer's start state.
Plan left_deep_plan(std::size_t n_slots);

/// Structural index of a plan; construction validates that the leaves are a
/// permutation of 0..n_slots-1.
struct PlanIndex {
  std::vector<int> parent;          // -1 for root
  std::vector<int> span_begin;      // node -> first in-order leaf position
  std::vector<int> span_end;        // node -> one past last position
  std::vector<int> inorder_slots;   // leaf position -> slot
  std::vector<int> postorder;       // children before parents
};
PlanIndex index_plan(const Plan& p, std::size_t n_slots);

/// Cost-model parameters. `alpha` is the arithmetic intensity weighting RW
/// against FLOPs; `beta` penalizes exceeding the memory budget `m_max`;
/// `p` is the exponent approximating the max norm over node sizes; `k` is
/// the number of request tuples a plan is costed for.
struct CostConfig {
  double alpha = 16.0;
  double beta = 8.0;
  std::uint64_t m_max = 8ull << 30;
  double p = 4.0;
  std::uint64_t k = 1;
  std::uint32_t bytes_per_scalar = 16;
};

/// Per-slot value-set sizes |V_j| and the request count the cost model uses.
struct ValueCounts {
  std::vector<std::uint64_t> per_slot;
  std::uint64_t k = 1;
  std::vector<LegId> batch_legs;  // output legs kept open (unprojected)
};

/// Bound mode: |V_j| = min(2^b, k) for b fixed output legs on slot j. Used
/// when only the request count is known (plan optimization).
ValueCounts bound_value_counts(const NetworkDiagram& d,
                               const std::vector<LegId>& batch_legs,
                               std::uint64_t k);

/// Exact mode: |V_j| from an assignment set; k is the number of distinct
/// request tuples.
ValueCounts exact_value_counts(const AssignmentSet& as);

/// Lexicographic structure of the distinct request tuples over a plan:
/// rank[node][row] orders the rows by their tuple restricted to the node's
/// leaves, and distinct[node] counts the restrictions. distinct[] is the
/// exact number of times each subexpression is evaluated.
struct TupleIndex {
  std::vector<std::vector<std::uint32_t>> rows;  // distinct tuples, by slot
  std::vector<int> row_of_request;               // request -> row
  std::vector<std::vector<std::uint32_t>> rank;  // [node][row]
  std::vector<std::uint32_t> distinct;           // [node]

  std::size_t row_count() const { return rows.size(); }
};
TupleIndex build_tuple_index(const Plan& p, const AssignmentSet& as);

struct NodeAnnotation {
  std::vector<LegId> legs;     // result legs, ascending
  std::uint64_t size = 1;      // elements, sliced and fixed legs as dim 1
  std::uint32_t out_legs = 0;  // circuit-output legs carried
  std::uint64_t k_t = 1;       // evaluation-count bound (exact in exact mode)
  std::uint64_t mults = 0, adds = 0, rw = 0;  // contraction at this node
  std::uint64_t m_k = 0;       // k_t * size
  std::uint64_t m_cache = 0;   // cache share of the memory heuristic
};

/// One of the four rewrite rules at an internal node:
///   1: (a*b)*c -> (c*b)*a     2: (a*b)*c -> (a*c)*b
///   3: a*(b*c) -> c*(b*a)     4: a*(b*c) -> b*(a*c)
/// Each rule is its own inverse.
struct Rewrite {
  int node = -1;
  int rule = 1;
};

/// A plan with full cost annotations, supporting O(1)-ish local updates
/// after a rewrite. In exact mode (constructed with an AssignmentSet) the
/// per-node k_t are the exact distinct-tuple counts, so total_cost equals
/// the instrumented operation count of a real run.
class CostedPlan {
 public:
  CostedPlan(Plan plan, const NetworkDiagram& d, const CostConfig& cfg,
             const ValueCounts& counts,
             const AssignmentSet* exact = nullptr);

  const Plan& plan() const { return plan_; }
  const CostConfig& config() const { return cfg_; }
  const NodeAnnotation& node(int i) const { return ann_[i]; }
  std::size_t node_count() const { return plan_.nodes.size(); }
  int root() const { return plan_.root; }
  int parent_of(int node) const { return parent_[node]; }

  /// Π dims of the sliced legs: how often the whole tree is re-evaluated.
  std::uint64_t slice_multiplicity() const { return slice_mult_; }

  /// C(T,k): k_t-weighted mults+adds over all nodes, times the slice
  /// multiplicity.
  u128 total_cost() const;
  u128 total_mults() const;
  u128 total_adds() const;
  /// k_t-weighted element reads/writes, times the slice multiplicity.
  u128 total_rw() const;

  /// Heuristic memory footprint M(T,k) in bytes.
  double memory_estimate_bytes() const;

  /// f = beta*max(log2(M/m_max), 0) + log2(C + alpha*RW).
  double objective() const;

  bool applicable(const Rewrite& r) const;
  /// total_cost(before) - total_cost(after), computed from the two affected
  /// nodes only; equals the from-scratch difference exactly.
  i128 delta_cost(const Rewrite& r) const;
  /// Applies the rewrite in place with a local annotation update.
  void apply(const Rewrite& r);

  /// Slicing edits; both trigger a global recompute. Output legs and legs
  /// already in (or absent from) the slice list are rejected.
  void add_slice(LegId leg);
  void remove_slice(LegId leg);

  std::size_t leg_count() const { return leg_dims_.size(); }
  /// True for closed legs not currently in the slice list.
  bool leg_sliceable(LegId leg) const {
    return leg < leg_dims_.size() && leg_cls_[leg] == 0 && !sliced_mask_[leg];
  }

  /// Full recomputation from scratch (also refreshes the incremental
  /// floating-point aggregates).
  void recompute();

 private:
  NodeAnnotation annotate_leaf(int node) const;
  NodeAnnotation annotate_internal(int node, const NodeAnnotation& l,
                                   const NodeAnnotation& r,
                                   std::uint64_t k_t) const;
  std::uint64_t bound_kt(const NodeAnnotation& l, const NodeAnnotation& r) const;
  std::uint64_t exact_kt_after(int mid, int new_left, int new_right) const;
  void refresh_slice_mask();
  struct RewriteShape;
  RewriteShape shape_of(const Rewrite& r) const;

  Plan plan_;
  CostConfig cfg_;
  std::vector<std::uint64_t> slot_values_;
  std::uint64_t k_;
  std::vector<std::uint32_t> leg_dims_;
  std::vector<std::uint8_t> leg_cls_;  // 0 closed, 1 fixed output, 2 batch
  std::vector<std::vector<Leg>> slot_legs_;
  std::vector<std::uint8_t> sliced_mask_;
  std::optional<TupleIndex> tuples_;
  std::vector<int> parent_;
  std::vector<NodeAnnotation> ann_;
  std::uint64_t slice_mult_ = 1;
  u128 tot_mults_ = 0, tot_adds_ = 0, tot_rw_ = 0;  // k_t-weighted, unsliced
  u128 sum_mk_ = 0;
  long double sum_mp_ = 0.0L;
};

/// f from raw totals; throws DataError when C + alpha*RW == 0.
double objective_value(long double cost, long double rw, long double m_bytes,
                       const CostConfig& cfg);

}  // namespace mtc

#endif  // MTC_PLAN_HPP
