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

#include "mtc/plan.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mtc/errors.hpp"

namespace mtc {

namespace {

constexpr std::uint64_t kU64Max = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  u128 p = static_cast<u128>(a) * b;
  return p > kU64Max ? kU64Max : static_cast<std::uint64_t>(p);
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a + b;
  return s < a ? kU64Max : s;
}

long double ld_of_u128(u128 v) {
  return std::ldexp(static_cast<long double>(static_cast<std::uint64_t>(v >> 64)),
                     64) +
         static_cast<long double>(static_cast<std::uint64_t>(v));
}

}  // namespace

std::size_t Plan::leaf_count() const {
  std::size_t n = 0;
  for (const Node& nd : nodes)
    if (nd.leaf()) ++n;
  return n;
}

std::string format_plan(const Plan& p) {
  if (p.root < 0) throw DataError("cannot format an empty plan");
  std::string tree;
  auto render = [&](auto&& self, int node) -> std::string {
    const Plan::Node& nd = p.nodes[node];
    if (nd.leaf()) return std::to_string(nd.slot);
    return "(" + self(self, nd.left) + " " + self(self, nd.right) + ")";
  };
  const Plan::Node& root = p.nodes[p.root];
  if (root.leaf())
    tree = "(" + std::to_string(root.slot) + ")";
  else
    tree = render(render, root.left) + " " + render(render, root.right);
  std::string slice = "slice:";
  for (LegId l : p.sliced) slice += " " + std::to_string(l);
  return tree + "\n" + slice + "\n";
}

namespace {

struct PlanParser {
  const std::string& text;
  std::size_t pos = 0;
  Plan plan;

  explicit PlanParser(const std::string& t) : text(t) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("plan parse error at position " + std::to_string(pos) +
                     ": " + msg);
  }

  void skip_spaces() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }

  bool at_line_end() {
    skip_spaces();
    return pos >= text.size() || text[pos] == '\n' || text[pos] == '\r';
  }

  int make_leaf(int slot) {
    plan.nodes.push_back({-1, -1, slot});
    return static_cast<int>(plan.nodes.size()) - 1;
  }

  int make_pair(int l, int r) {
    plan.nodes.push_back({l, r, -1});
    return static_cast<int>(plan.nodes.size()) - 1;
  }

  int parse_item() {
    skip_spaces();
    if (pos >= text.size()) fail("unexpected end of input");
    if (text[pos] == '(') {
      ++pos;
      int node = parse_sequence(true);
      skip_spaces();
      if (pos >= text.size() || text[pos] != ')') fail("expected ')'");
      ++pos;
      return node;
    }
    if (std::isdigit(static_cast<unsigned char>(text[pos]))) {
      int v = 0;
      while (pos < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[pos])))
        v = v * 10 + (text[pos++] - '0');
      return make_leaf(v);
    }
    fail(std::string("unexpected character '") + text[pos] + "'");
  }

  // A space-separated sequence of items, combined left-associatively.
  int parse_sequence(bool in_parens) {
    int node = parse_item();
    for (;;) {
      skip_spaces();
      if (pos >= text.size() || text[pos] == '\n' || text[pos] == '\r') break;
      if (text[pos] == ')') {
        if (!in_parens) fail("unbalanced ')'");
        break;
      }
      node = make_pair(node, parse_item());
    }
    return node;
  }

  Plan run() {
    skip_spaces();
    if (at_line_end()) fail("empty plan line");
    plan.root = parse_sequence(false);
    // Optional slice line.
    while (pos < text.size() && (text[pos] == '\n' || text[pos] == '\r')) ++pos;
    skip_spaces();
    if (pos < text.size()) {
      static const std::string kTag = "slice:";
      if (text.compare(pos, kTag.size(), kTag) != 0) fail("expected 'slice:'");
      pos += kTag.size();
      while (!at_line_end()) {
        skip_spaces();
        if (!std::isdigit(static_cast<unsigned char>(text[pos])))
          fail("expected a leg id in the slice list");
        LegId v = 0;
        while (pos < text.size() &&
               std::isdigit(static_cast<unsigned char>(text[pos])))
          v = v * 10 + static_cast<LegId>(text[pos++] - '0');
        plan.sliced.push_back(v);
      }
      while (pos < text.size() && (text[pos] == '\n' || text[pos] == '\r'))
        ++pos;
      skip_spaces();
      if (pos < text.size()) fail("trailing content after slice line");
    }
    return std::move(plan);
  }
};

}  // namespace

Plan parse_plan(const std::string& text) { return PlanParser(text).run(); }

Plan parse_plan_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open plan file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_plan(ss.str());
}

Plan left_deep_plan(std::size_t n_slots) {
  if (n_slots == 0) throw DataError("plan needs at least one slot");
  Plan p;
  p.nodes.push_back({-1, -1, 0});
  int acc = 0;
  for (std::size_t s = 1; s < n_slots; ++s) {
    p.nodes.push_back({-1, -1, static_cast<int>(s)});
    int leaf = static_cast<int>(p.nodes.size()) - 1;
    p.nodes.push_back({acc, leaf, -1});
    acc = static_cast<int>(p.nodes.size()) - 1;
  }
  p.root = acc;
  return p;
}

PlanIndex index_plan(const Plan& p, std::size_t n_slots) {
  const std::size_t n = p.nodes.size();
  if (p.root < 0 || static_cast<std::size_t>(p.root) >= n)
    throw DataError("plan has no root");
  PlanIndex idx;
  idx.parent.assign(n, -2);  // -2 = unvisited
  idx.span_begin.assign(n, 0);
  idx.span_end.assign(n, 0);

  // Iterative postorder from the root.
  std::vector<std::pair<int, int>> stack{{p.root, 0}};
  idx.parent[p.root] = -1;
  while (!stack.empty()) {
    auto& [node, phase] = stack.back();
    const Plan::Node& nd = p.nodes[node];
    if (nd.leaf()) {
      if (nd.slot >= static_cast<int>(n_slots))
        throw DataError("leaf slot " + std::to_string(nd.slot) +
                        " out of range");
      idx.span_begin[node] = static_cast<int>(idx.inorder_slots.size());
      idx.inorder_slots.push_back(nd.slot);
      idx.span_end[node] = static_cast<int>(idx.inorder_slots.size());
      idx.postorder.push_back(node);
      stack.pop_back();
      continue;
    }
    if (nd.left < 0 || nd.right < 0 ||
        static_cast<std::size_t>(nd.left) >= n ||
        static_cast<std::size_t>(nd.right) >= n)
      throw DataError("malformed plan node");
    if (phase == 0) {
      phase = 1;
      if (idx.parent[nd.left] != -2) throw DataError("plan is not a tree");
      idx.parent[nd.left] = node;
      stack.push_back({nd.left, 0});
    } else if (phase == 1) {
      phase = 2;
      if (idx.parent[nd.right] != -2) throw DataError("plan is not a tree");
      idx.parent[nd.right] = node;
      stack.push_back({nd.right, 0});
    } else {
      idx.span_begin[node] = idx.span_begin[nd.left];
      idx.span_end[node] = idx.span_end[nd.right];
      idx.postorder.push_back(node);
      stack.pop_back();
    }
  }

  std::vector<bool> seen(n_slots, false);
  for (int s : idx.inorder_slots) {
    if (seen[s])
      throw DataError("slot " + std::to_string(s) + " appears twice in plan");
    seen[s] = true;
  }
  if (idx.inorder_slots.size() != n_slots)
    throw DataError("plan covers " + std::to_string(idx.inorder_slots.size()) +
                    " slots, diagram has " + std::to_string(n_slots));
  return idx;
}

ValueCounts bound_value_counts(const NetworkDiagram& d,
                               const std::vector<LegId>& batch_legs,
                               std::uint64_t k) {
  ValueCounts vc;
  vc.k = k;
  vc.batch_legs = batch_legs;
  std::sort(vc.batch_legs.begin(), vc.batch_legs.end());
  vc.per_slot.resize(d.slot_count());
  for (std::size_t j = 0; j < d.slot_count(); ++j) {
    std::uint64_t v = 1;
    for (LegId l : d.slot_open_legs[j])
      if (!std::binary_search(vc.batch_legs.begin(), vc.batch_legs.end(), l))
        v = sat_mul(v, d.leg_dims[l]);
    vc.per_slot[j] = std::min(v, std::max<std::uint64_t>(k, 1));
  }
  return vc;
}

ValueCounts exact_value_counts(const AssignmentSet& as) {
  ValueCounts vc;
  vc.batch_legs = as.batch_legs;
  vc.per_slot.resize(as.value_sets.size());
  for (std::size_t j = 0; j < as.value_sets.size(); ++j)
    vc.per_slot[j] = as.value_sets[j].size();
  std::vector<std::vector<std::uint32_t>> sorted = as.tuples;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  vc.k = sorted.size();
  return vc;
}

TupleIndex build_tuple_index(const Plan& p, const AssignmentSet& as) {
  TupleIndex ti;
  PlanIndex idx = index_plan(p, as.value_sets.size());

  std::vector<std::vector<std::uint32_t>> sorted = as.tuples;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  ti.rows = std::move(sorted);
  ti.row_of_request.resize(as.tuples.size());
  for (std::size_t i = 0; i < as.tuples.size(); ++i)
    ti.row_of_request[i] = static_cast<int>(
        std::lower_bound(ti.rows.begin(), ti.rows.end(), as.tuples[i]) -
        ti.rows.begin());

  const std::size_t rows = ti.rows.size();
  ti.rank.assign(p.nodes.size(), {});
  ti.distinct.assign(p.nodes.size(), 0);
  std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(rows);
  for (int node : idx.postorder) {
    const Plan::Node& nd = p.nodes[node];
    std::vector<std::uint32_t>& rk = ti.rank[node];
    rk.resize(rows);
    if (nd.leaf()) {
      for (std::size_t r = 0; r < rows; ++r)
        keyed[r] = {ti.rows[r][nd.slot], static_cast<std::uint32_t>(r)};
    } else {
      const auto& rl = ti.rank[nd.left];
      const auto& rr = ti.rank[nd.right];
      for (std::size_t r = 0; r < rows; ++r)
        keyed[r] = {(static_cast<std::uint64_t>(rl[r]) << 32) | rr[r],
                    static_cast<std::uint32_t>(r)};
    }
    std::sort(keyed.begin(), keyed.end());
    std::uint32_t next = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r > 0 && keyed[r].first != keyed[r - 1].first) ++next;
      rk[keyed[r].second] = next;
    }
    ti.distinct[node] = rows == 0 ? 0 : next + 1;
  }
  return ti;
}

// ---------------------------------------------------------------------------
// CostedPlan

CostedPlan::CostedPlan(Plan plan, const NetworkDiagram& d,
                       const CostConfig& cfg, const ValueCounts& counts,
                       const AssignmentSet* exact)
    : plan_(std::move(plan)), cfg_(cfg) {
  PlanIndex idx = index_plan(plan_, d.slot_count());
  parent_ = idx.parent;

  if (counts.per_slot.size() != d.slot_count())
    throw DataError("value counts do not match diagram slots");
  slot_values_ = counts.per_slot;
  k_ = counts.k;

  leg_dims_ = d.leg_dims;
  leg_cls_.assign(d.leg_count(), 0);
  for (LegId l : d.open_legs) leg_cls_[l] = 1;
  for (LegId l : counts.batch_legs) {
    if (!d.is_open(l))
      throw DataError("batch leg " + std::to_string(l) + " is not open");
    leg_cls_[l] = 2;
  }
  slot_legs_.resize(d.slot_count());
  for (std::size_t j = 0; j < d.slot_count(); ++j) {
    slot_legs_[j] = d.slot_tensors[j].legs();
    std::sort(slot_legs_[j].begin(), slot_legs_[j].end(),
              [](const Leg& a, const Leg& b) { return a.id < b.id; });
  }

  if (exact) {
    tuples_ = build_tuple_index(plan_, *exact);
    k_ = tuples_->row_count();
  }
  refresh_slice_mask();
  recompute();
}

void CostedPlan::refresh_slice_mask() {
  sliced_mask_.assign(leg_dims_.size(), 0);
  slice_mult_ = 1;
  for (LegId l : plan_.sliced) {
    if (l >= leg_dims_.size())
      throw DataError("sliced leg " + std::to_string(l) + " does not exist");
    if (leg_cls_[l] != 0)
      throw DataError("sliced leg " + std::to_string(l) +
                      " is an output leg; output legs cannot be sliced");
    if (sliced_mask_[l])
      throw DataError("leg " + std::to_string(l) + " sliced twice");
    sliced_mask_[l] = 1;
    slice_mult_ = sat_mul(slice_mult_, leg_dims_[l]);
  }
}

NodeAnnotation CostedPlan::annotate_leaf(int node) const {
  NodeAnnotation a;
  int slot = plan_.nodes[node].slot;
  a.legs.clear();
  a.size = 1;
  for (const Leg& l : slot_legs_[slot]) {
    a.legs.push_back(l.id);
    if (leg_cls_[l.id] != 0) ++a.out_legs;
    std::uint32_t dim =
        (sliced_mask_[l.id] || leg_cls_[l.id] == 1) ? 1 : l.dim;
    a.size = sat_mul(a.size, dim);
  }
  a.k_t = tuples_ ? tuples_->distinct[node]
                  : std::min<std::uint64_t>(slot_values_[slot],
                                            std::max<std::uint64_t>(k_, 1));
  a.m_k = sat_mul(a.k_t, a.size);
  return a;
}

std::uint64_t CostedPlan::bound_kt(const NodeAnnotation& l,
                                   const NodeAnnotation& r) const {
  u128 prod = static_cast<u128>(l.k_t) * r.k_t;
  u128 cap = std::max<std::uint64_t>(k_, 1);
  return static_cast<std::uint64_t>(std::min(prod, cap));
}

NodeAnnotation CostedPlan::annotate_internal(int node, const NodeAnnotation& l,
                                             const NodeAnnotation& r,
                                             std::uint64_t k_t) const {
  (void)node;
  NodeAnnotation a;
  a.k_t = k_t;
  std::uint64_t d_closed = 1;
  a.size = 1;
  // Children leg lists are ascending; merge-walk the intersection (closed
  // here) and symmetric difference (the result).
  std::size_t i = 0, j = 0;
  auto effective = [&](LegId id) -> std::uint64_t {
    return (sliced_mask_[id] || leg_cls_[id] == 1) ? 1 : leg_dims_[id];
  };
  while (i < l.legs.size() || j < r.legs.size()) {
    LegId li = i < l.legs.size() ? l.legs[i] : ~LegId{0};
    LegId rj = j < r.legs.size() ? r.legs[j] : ~LegId{0};
    if (li == rj) {
      d_closed = sat_mul(d_closed, effective(li));
      ++i, ++j;
    } else {
      LegId keep = li < rj ? li : rj;
      a.legs.push_back(keep);
      a.size = sat_mul(a.size, effective(keep));
      if (leg_cls_[keep] != 0) ++a.out_legs;
      li < rj ? ++i : ++j;
    }
  }
  a.mults = sat_mul(d_closed, a.size);
  a.adds = sat_mul(d_closed - 1, a.size);
  a.rw = sat_add(sat_add(l.size, r.size), a.size);
  a.m_k = sat_mul(a.k_t, a.size);
  if (a.k_t <= 1) {
    a.m_cache = 0;
  } else if (std::min(l.k_t, r.k_t) < a.k_t) {
    a.m_cache = std::min(sat_add(l.m_k, r.size), sat_add(l.size, r.m_k));
  } else {
    a.m_cache = std::min(l.m_k, r.m_k);
  }
  return a;
}

void CostedPlan::recompute() {
  refresh_slice_mask();
  ann_.assign(plan_.nodes.size(), {});
  tot_mults_ = tot_adds_ = tot_rw_ = 0;
  sum_mk_ = 0;
  sum_mp_ = 0.0L;

  std::vector<std::pair<int, int>> stack{{plan_.root, 0}};
  while (!stack.empty()) {
    auto& [node, phase] = stack.back();
    const Plan::Node& nd = plan_.nodes[node];
    if (nd.leaf()) {
      ann_[node] = annotate_leaf(node);
      stack.pop_back();
    } else if (phase == 0) {
      phase = 1;
      stack.push_back({nd.left, 0});
    } else if (phase == 1) {
      phase = 2;
      stack.push_back({nd.right, 0});
    } else {
      const NodeAnnotation& l = ann_[nd.left];
      const NodeAnnotation& r = ann_[nd.right];
      std::uint64_t kt =
          tuples_ ? tuples_->distinct[node] : bound_kt(l, r);
      ann_[node] = annotate_internal(node, l, r, kt);
      stack.pop_back();
    }
  }
  for (std::size_t n = 0; n < ann_.size(); ++n) {
    const NodeAnnotation& a = ann_[n];
    tot_mults_ += static_cast<u128>(a.k_t) * a.mults;
    tot_adds_ += static_cast<u128>(a.k_t) * a.adds;
    tot_rw_ += static_cast<u128>(a.k_t) * a.rw;
    sum_mk_ += a.m_cache;
    sum_mp_ += std::pow(static_cast<long double>(a.size),
                         static_cast<long double>(cfg_.p));
  }
}

u128 CostedPlan::total_cost() const {
  return (tot_mults_ + tot_adds_) * slice_mult_;
}
u128 CostedPlan::total_mults() const { return tot_mults_ * slice_mult_; }
u128 CostedPlan::total_adds() const { return tot_adds_ * slice_mult_; }
u128 CostedPlan::total_rw() const { return tot_rw_ * slice_mult_; }

double CostedPlan::memory_estimate_bytes() const {
  long double norm =
      std::pow(sum_mp_, 1.0L / static_cast<long double>(cfg_.p));
  long double m = ld_of_u128(sum_mk_) + 2.0L * norm;
  return static_cast<double>(m * cfg_.bytes_per_scalar);
}

double CostedPlan::objective() const {
  return objective_value(ld_of_u128(total_cost()), ld_of_u128(total_rw()),
                         memory_estimate_bytes(), cfg_);
}

struct CostedPlan::RewriteShape {
  int top;        // the rewritten node
  int mid;        // its internal child that gets rebuilt
  int mid_left;   // new children of mid
  int mid_right;
  bool mid_is_left;  // mid stays on this side of top
  int other;         // top's other child after the rewrite
};

CostedPlan::RewriteShape CostedPlan::shape_of(const Rewrite& r) const {
  if (r.node < 0 || static_cast<std::size_t>(r.node) >= plan_.nodes.size())
    throw DataError("rewrite node out of range");
  const Plan::Node& top = plan_.nodes[r.node];
  if (top.leaf()) throw DataError("rewrite target is a leaf");
  RewriteShape s{};
  s.top = r.node;
  switch (r.rule) {
    case 1: {  // (a*b)*c -> (c*b)*a
      if (!(top.left >= 0) || plan_.nodes[top.left].leaf())
        throw DataError("rule 1 needs an internal left child");
      s.mid = top.left;
      s.mid_left = top.right;                  // c
      s.mid_right = plan_.nodes[s.mid].right;  // b
      s.mid_is_left = true;
      s.other = plan_.nodes[s.mid].left;  // a
      break;
    }
    case 2: {  // (a*b)*c -> (a*c)*b
      if (!(top.left >= 0) || plan_.nodes[top.left].leaf())
        throw DataError("rule 2 needs an internal left child");
      s.mid = top.left;
      s.mid_left = plan_.nodes[s.mid].left;  // a
      s.mid_right = top.right;               // c
      s.mid_is_left = true;
      s.other = plan_.nodes[s.mid].right;  // b
      break;
    }
    case 3: {  // a*(b*c) -> c*(b*a)
      if (!(top.right >= 0) || plan_.nodes[top.right].leaf())
        throw DataError("rule 3 needs an internal right child");
      s.mid = top.right;
      s.mid_left = plan_.nodes[s.mid].left;  // b
      s.mid_right = top.left;                // a
      s.mid_is_left = false;
      s.other = plan_.nodes[s.mid].right;  // c
      break;
    }
    case 4: {  // a*(b*c) -> b*(a*c)
      if (!(top.right >= 0) || plan_.nodes[top.right].leaf())
        throw DataError("rule 4 needs an internal right child");
      s.mid = top.right;
      s.mid_left = top.left;                   // a
      s.mid_right = plan_.nodes[s.mid].right;  // c
      s.mid_is_left = false;
      s.other = plan_.nodes[s.mid].left;  // b
      break;
    }
    default:
      throw DataError("rewrite rule must be 1..4");
  }
  return s;
}

bool CostedPlan::applicable(const Rewrite& r) const {
  if (r.rule < 1 || r.rule > 4) return false;
  if (r.node < 0 || static_cast<std::size_t>(r.node) >= plan_.nodes.size())
    return false;
  const Plan::Node& top = plan_.nodes[r.node];
  if (top.leaf()) return false;
  int child = (r.rule <= 2) ? top.left : top.right;
  return child >= 0 && !plan_.nodes[child].leaf();
}

std::uint64_t CostedPlan::exact_kt_after(int mid, int new_left,
                                         int new_right) const {
  (void)mid;
  const auto& rl = tuples_->rank[new_left];
  const auto& rr = tuples_->rank[new_right];
  std::vector<std::uint64_t> keys(rl.size());
  for (std::size_t i = 0; i < rl.size(); ++i)
    keys[i] = (static_cast<std::uint64_t>(rl[i]) << 32) | rr[i];
  std::sort(keys.begin(), keys.end());
  return std::unique(keys.begin(), keys.end()) - keys.begin();
}

i128 CostedPlan::delta_cost(const Rewrite& r) const {
  RewriteShape s = shape_of(r);
  const NodeAnnotation& old_mid = ann_[s.mid];
  const NodeAnnotation& old_top = ann_[s.top];

  std::uint64_t k_mid =
      tuples_ ? exact_kt_after(s.mid, s.mid_left, s.mid_right)
              : bound_kt(ann_[s.mid_left], ann_[s.mid_right]);
  NodeAnnotation new_mid = annotate_internal(s.mid, ann_[s.mid_left],
                                             ann_[s.mid_right], k_mid);
  const NodeAnnotation& l = s.mid_is_left ? new_mid : ann_[s.other];
  const NodeAnnotation& rr = s.mid_is_left ? ann_[s.other] : new_mid;
  NodeAnnotation new_top = annotate_internal(s.top, l, rr, old_top.k_t);

  u128 before = static_cast<u128>(old_mid.k_t) * (old_mid.mults + old_mid.adds) +
                static_cast<u128>(old_top.k_t) * (old_top.mults + old_top.adds);
  u128 after = static_cast<u128>(new_mid.k_t) * (new_mid.mults + new_mid.adds) +
               static_cast<u128>(new_top.k_t) * (new_top.mults + new_top.adds);
  return (static_cast<i128>(before) - static_cast<i128>(after)) *
         static_cast<i128>(slice_mult_);
}

void CostedPlan::apply(const Rewrite& r) {
  RewriteShape s = shape_of(r);
  Plan::Node& top = plan_.nodes[s.top];
  Plan::Node& mid = plan_.nodes[s.mid];

  // Swap a grandchild with top's other child, per rule.
  switch (r.rule) {
    case 1:
      std::swap(mid.left, top.right);
      break;
    case 2:
      std::swap(mid.right, top.right);
      break;
    case 3:
      std::swap(mid.right, top.left);
      break;
    case 4:
      std::swap(mid.left, top.left);
      break;
  }
  parent_[mid.left] = s.mid;
  parent_[mid.right] = s.mid;
  parent_[top.left] = s.top;
  parent_[top.right] = s.top;

  auto retract = [&](int n) {
    const NodeAnnotation& a = ann_[n];
    tot_mults_ -= static_cast<u128>(a.k_t) * a.mults;
    tot_adds_ -= static_cast<u128>(a.k_t) * a.adds;
    tot_rw_ -= static_cast<u128>(a.k_t) * a.rw;
    sum_mk_ -= a.m_cache;
    sum_mp_ -= std::pow(static_cast<long double>(a.size),
                         static_cast<long double>(cfg_.p));
  };
  auto admit = [&](int n) {
    const NodeAnnotation& a = ann_[n];
    tot_mults_ += static_cast<u128>(a.k_t) * a.mults;
    tot_adds_ += static_cast<u128>(a.k_t) * a.adds;
    tot_rw_ += static_cast<u128>(a.k_t) * a.rw;
    sum_mk_ += a.m_cache;
    sum_mp_ += std::pow(static_cast<long double>(a.size),
                         static_cast<long double>(cfg_.p));
  };
  retract(s.mid);
  retract(s.top);

  if (tuples_) {
    // mid's leaf set changed; rebuild its row partition from its new
    // children. Ancestor partitions are unaffected.
    const auto& rl = tuples_->rank[mid.left];
    const auto& rc = tuples_->rank[mid.right];
    const std::size_t rows = tuples_->row_count();
    std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(rows);
    for (std::size_t i = 0; i < rows; ++i)
      keyed[i] = {(static_cast<std::uint64_t>(rl[i]) << 32) | rc[i],
                  static_cast<std::uint32_t>(i)};
    std::sort(keyed.begin(), keyed.end());
    std::uint32_t next = 0;
    auto& rk = tuples_->rank[s.mid];
    for (std::size_t i = 0; i < rows; ++i) {
      if (i > 0 && keyed[i].first != keyed[i - 1].first) ++next;
      rk[keyed[i].second] = next;
    }
    tuples_->distinct[s.mid] = rows == 0 ? 0 : next + 1;
  }

  std::uint64_t k_mid = tuples_ ? tuples_->distinct[s.mid]
                                : bound_kt(ann_[mid.left], ann_[mid.right]);
  ann_[s.mid] =
      annotate_internal(s.mid, ann_[mid.left], ann_[mid.right], k_mid);
  std::uint64_t k_top = tuples_ ? tuples_->distinct[s.top]
                                : bound_kt(ann_[top.left], ann_[top.right]);
  ann_[s.top] =
      annotate_internal(s.top, ann_[top.left], ann_[top.right], k_top);
  admit(s.mid);
  admit(s.top);
}

void CostedPlan::add_slice(LegId leg) {
  if (leg >= leg_dims_.size())
    throw DataError("sliced leg " + std::to_string(leg) + " does not exist");
  if (leg_cls_[leg] != 0)
    throw DataError("output legs cannot be sliced");
  if (std::find(plan_.sliced.begin(), plan_.sliced.end(), leg) !=
      plan_.sliced.end())
    throw DataError("leg " + std::to_string(leg) + " already sliced");
  plan_.sliced.push_back(leg);
  recompute();
}

void CostedPlan::remove_slice(LegId leg) {
  auto it = std::find(plan_.sliced.begin(), plan_.sliced.end(), leg);
  if (it == plan_.sliced.end())
    throw DataError("leg " + std::to_string(leg) + " is not sliced");
  plan_.sliced.erase(it);
  recompute();
}

double objective_value(long double cost, long double rw, long double m_bytes,
                       const CostConfig& cfg) {
  long double work = cost + static_cast<long double>(cfg.alpha) * rw;
  if (work <= 0.0L)
    throw DataError("objective undefined: plan performs no work");
  long double f = std::log2(work);
  if (m_bytes > 0.0L && cfg.m_max > 0) {
    long double over =
        std::log2(m_bytes / static_cast<long double>(cfg.m_max));
    if (over > 0.0L) f += static_cast<long double>(cfg.beta) * over;
  }
  return static_cast<double>(f);
}

}  // namespace mtc
