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

#include "mtc/multieval.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <stdexcept>
#include <thread>

#include "mtc/errors.hpp"

namespace mtc {

namespace {

constexpr std::uint32_t kBytesPerScalar = sizeof(Complex);

struct Session {
  OpCounters counters;
  std::uint64_t resident = 0;
  std::uint64_t peak = 0;
  std::uint64_t cap = 0;  // 0 = unlimited
  std::vector<std::uint64_t> node_contractions;

  void allocate(std::uint64_t bytes, int node) {
    resident += bytes;
    if (resident > peak) peak = resident;
    if (cap && resident > cap)
      throw MemoryCapError(
          "memory cap exceeded at node " + std::to_string(node) + " (" +
              std::to_string(resident) + " > " + std::to_string(cap) +
              " bytes)",
          node);
  }
  void release(std::uint64_t bytes) { resident -= bytes; }
};

std::uint64_t legs_size(const std::vector<Leg>& legs) {
  std::uint64_t n = 1;
  for (const Leg& l : legs) n *= l.dim;
  return n;
}

std::vector<LegId> shared_legs(const std::vector<Leg>& a,
                               const std::vector<Leg>& b) {
  std::vector<LegId> ids;
  for (const Leg& la : a)
    for (const Leg& lb : b)
      if (la.id == lb.id) ids.push_back(la.id);
  return ids;
}

// Value carrying real data. Leaves reference their assignment tensor; every
// other value owns its data. Bytes are returned to the session on
// destruction, so shared_ptr lifetimes drive the resident count.
struct RealVal {
  Tensor owned;
  const Tensor* view = nullptr;
  Session* session;
  std::uint64_t bytes;

  RealVal(Tensor t, Session* s, std::uint64_t b)
      : owned(std::move(t)), session(s), bytes(b) {}
  RealVal(const Tensor* t, Session* s, std::uint64_t b)
      : view(t), session(s), bytes(b) {}
  RealVal(const RealVal&) = delete;
  ~RealVal() { session->release(bytes); }

  const Tensor& tensor() const { return view ? *view : owned; }
};

struct RealOps {
  using Ptr = std::shared_ptr<RealVal>;

  static Ptr leaf(Session& s, const Tensor& t) {
    std::uint64_t bytes = t.size() * kBytesPerScalar;
    s.allocate(bytes, -1);
    return std::make_shared<RealVal>(&t, &s, bytes);
  }

  static Ptr contract(Session& s, int node, const Ptr& a, const Ptr& b) {
    const Tensor& ta = a->tensor();
    const Tensor& tb = b->tensor();
    std::vector<LegId> closed = shared_legs(ta.legs(), tb.legs());
    std::vector<Leg> rl = contraction_result_legs(ta.legs(), tb.legs(), closed);
    std::uint64_t bytes = legs_size(rl) * kBytesPerScalar;
    s.allocate(bytes, node);
    Tensor r = contract_pair(ta, tb, closed, &s.counters);
    return std::make_shared<RealVal>(std::move(r), &s, bytes);
  }

  static Ptr project(Session& s, const Ptr& t, LegId leg, std::uint32_t v) {
    const Tensor& tt = t->tensor();
    std::uint64_t bytes = tt.size() / tt.dim_of(leg) * kBytesPerScalar;
    s.allocate(bytes, -1);
    return std::make_shared<RealVal>(project_leg(tt, leg, v), &s, bytes);
  }

  static std::vector<Leg> result_legs(const Ptr& p) {
    return p->tensor().legs();
  }
};

// Shape-only twin of RealVal: same allocation pattern, no data.
struct ShapeVal {
  std::vector<Leg> legs;
  Session* session;
  std::uint64_t bytes;

  ShapeVal(std::vector<Leg> l, Session* s, std::uint64_t b)
      : legs(std::move(l)), session(s), bytes(b) {}
  ShapeVal(const ShapeVal&) = delete;
  ~ShapeVal() { session->release(bytes); }
};

struct ShapeOps {
  using Ptr = std::shared_ptr<ShapeVal>;

  static Ptr leaf(Session& s, const Tensor& t) {
    std::uint64_t bytes = t.size() * kBytesPerScalar;
    s.allocate(bytes, -1);
    return std::make_shared<ShapeVal>(t.legs(), &s, bytes);
  }

  static Ptr contract(Session& s, int node, const Ptr& a, const Ptr& b) {
    std::vector<LegId> closed = shared_legs(a->legs, b->legs);
    std::vector<Leg> rl = contraction_result_legs(a->legs, b->legs, closed);
    PairCost pc = predicted_cost(a->legs, b->legs, closed);
    s.counters.mults += pc.mults;
    s.counters.adds += pc.adds;
    s.counters.rw += pc.rw;
    std::uint64_t bytes = legs_size(rl) * kBytesPerScalar;
    s.allocate(bytes, node);
    return std::make_shared<ShapeVal>(std::move(rl), &s, bytes);
  }

  static Ptr project(Session& s, const Ptr& t, LegId leg, std::uint32_t v) {
    (void)v;
    std::vector<Leg> rl;
    std::uint64_t dim = 1;
    for (const Leg& l : t->legs) {
      if (l.id == leg)
        dim = l.dim;
      else
        rl.push_back(l);
    }
    if (dim == 1 && rl.size() == t->legs.size())
      throw DataError("unknown leg " + std::to_string(leg));
    std::uint64_t bytes = legs_size(rl) * kBytesPerScalar;
    s.allocate(bytes, -1);
    return std::make_shared<ShapeVal>(std::move(rl), &s, bytes);
  }
};

// The multi-tensor contraction proper. `rows` lists distinct tuples (indices
// into ti.rows) sorted by the current node's lexicographic rank. The left
// cache holds at most one entry per node; the right cache holds the full
// dictionary of a node's right subtree, built by a nested run and dropped at
// the node's last use.
template <class Ops>
class Engine {
 public:
  using Ptr = typename Ops::Ptr;

  Engine(const Plan& plan, const TupleIndex& ti,
         std::vector<std::vector<Ptr>> leaves, Session& session)
      : plan_(plan), ti_(ti), leaves_(std::move(leaves)), session_(session) {}

  std::vector<Ptr> run_root() {
    std::vector<int> rows(ti_.row_count());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
    sort_rows(plan_.root, rows);
    std::vector<Ptr> out = run(plan_.root, rows);
    if (!left_.empty() || !right_.empty())
      throw std::logic_error("caches not empty after evaluation");
    std::vector<Ptr> by_row(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) by_row[rows[i]] = out[i];
    return by_row;
  }

 private:
  std::uint32_t rank_of(int node, int row) const {
    return ti_.rank[node][row];
  }

  void sort_rows(int node, std::vector<int>& rows) const {
    std::sort(rows.begin(), rows.end(), [&](int a, int b) {
      std::uint32_t ra = rank_of(node, a), rb = rank_of(node, b);
      return ra != rb ? ra < rb : a < b;
    });
  }

  std::vector<Ptr> run(int node, const std::vector<int>& rows) {
    std::vector<Ptr> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      out[i] = eval_prime(node, rows, i, i + 1);
    return out;
  }

  Ptr eval_prime(int node, const std::vector<int>& rows, std::size_t i,
                 std::size_t i_next) {
    const Plan::Node& nd = plan_.nodes[node];
    if (nd.leaf())
      return leaves_[nd.slot][ti_.rows[rows[i]][nd.slot]];

    const std::uint32_t rk = rank_of(node, rows[i]);
    const bool reuse = i > 0 && rank_of(node, rows[i - 1]) == rk;
    if (reuse) {
      auto it = left_.find(node);
      if (it == left_.end() || it->second.first != rk)
        throw std::logic_error("left cache miss on a repeated tuple");
      Ptr u = it->second.second;
      if (i_next >= rows.size()) {
        left_.erase(node);
        right_.erase(node);
      }
      return u;
    }

    auto rit = right_.find(node);
    if (rit == right_.end()) {
      // Materialize the right dictionary for this instance's rows.
      std::vector<int> rrows = rows;
      sort_rows(nd.right, rrows);
      rrows.erase(std::unique(rrows.begin(), rrows.end(),
                              [&](int a, int b) {
                                return rank_of(nd.right, a) ==
                                       rank_of(nd.right, b);
                              }),
                  rrows.end());
      std::vector<Ptr> vals = run(nd.right, rrows);
      std::map<std::uint32_t, Ptr> dict;
      for (std::size_t j = 0; j < rrows.size(); ++j)
        dict.emplace(rank_of(nd.right, rrows[j]), std::move(vals[j]));
      rit = right_.emplace(node, std::move(dict)).first;
    }

    std::size_t run_end = i;
    while (run_end + 1 < rows.size() &&
           rank_of(node, rows[run_end + 1]) == rk)
      ++run_end;
    Ptr ul = eval_prime(nd.left, rows, i, run_end + 1);
    Ptr ur = rit->second.at(rank_of(nd.right, rows[i]));
    Ptr u = Ops::contract(session_, node, ul, ur);
    ++session_.node_contractions[node];

    bool store = i_next < rows.size() && rank_of(node, rows[i_next]) == rk;
    if (store) {
      auto it = left_.find(node);
      if (it != left_.end() && it->second.first >= rk)
        throw std::logic_error("left cache eviction out of order");
      left_[node] = {rk, u};
    } else {
      left_.erase(node);
    }
    if (i_next >= rows.size()) {
      left_.erase(node);
      right_.erase(node);
    }
    return u;
  }

  const Plan& plan_;
  const TupleIndex& ti_;
  std::vector<std::vector<Ptr>> leaves_;
  Session& session_;
  std::map<int, std::pair<std::uint32_t, Ptr>> left_;
  std::map<int, std::map<std::uint32_t, Ptr>> right_;
};

void check_inputs(const Plan& plan, const NetworkDiagram& d,
                  const AssignmentSet& as) {
  index_plan(plan, d.slot_count());  // validates the leaf permutation
  if (as.value_sets.size() != d.slot_count())
    throw DataError("assignment set does not match the diagram");
  for (const auto& t : as.tuples) {
    if (t.size() != d.slot_count())
      throw DataError("request tuple does not cover every slot");
    for (std::size_t j = 0; j < t.size(); ++j)
      if (t[j] >= as.value_sets[j].size())
        throw DataError("request tuple indexes past slot " +
                        std::to_string(j) + "'s value set");
  }
}

template <class Ops>
std::vector<std::vector<typename Ops::Ptr>> wrap_leaves(
    Session& s, const std::vector<std::vector<Tensor>>& value_sets) {
  std::vector<std::vector<typename Ops::Ptr>> out(value_sets.size());
  for (std::size_t j = 0; j < value_sets.size(); ++j)
    for (const Tensor& t : value_sets[j]) out[j].push_back(Ops::leaf(s, t));
  return out;
}

// One unsliced multi-tensor run; returns per-distinct-row values.
template <class Ops>
std::vector<typename Ops::Ptr> run_once(
    const Plan& plan, const TupleIndex& ti,
    std::vector<std::vector<typename Ops::Ptr>> leaves, Session& session) {
  Engine<Ops> engine(plan, ti, std::move(leaves), session);
  return engine.run_root();
}

struct SliceSpec {
  std::vector<LegId> legs;
  std::vector<std::uint32_t> dims;
  std::uint64_t count = 1;

  std::vector<std::uint32_t> values_of(std::uint64_t index) const {
    std::vector<std::uint32_t> v(legs.size());
    for (std::size_t j = legs.size(); j-- > 0;) {
      v[j] = static_cast<std::uint32_t>(index % dims[j]);
      index /= dims[j];
    }
    return v;
  }
};

SliceSpec slice_spec(const Plan& plan, const NetworkDiagram& d) {
  SliceSpec s;
  for (LegId l : plan.sliced) {
    if (l >= d.leg_count())
      throw DataError("sliced leg " + std::to_string(l) + " does not exist");
    if (d.is_open(l))
      throw DataError("output legs cannot be sliced");
    if (std::find(s.legs.begin(), s.legs.end(), l) != s.legs.end())
      throw DataError("leg " + std::to_string(l) + " sliced twice");
    s.legs.push_back(l);
    s.dims.push_back(d.leg_dims[l]);
    s.count *= d.leg_dims[l];
    if (s.count > (1ull << 24))
      throw DataError("slice list expands to more than 2^24 slices");
  }
  return s;
}

// Per-slice leaf sets: leaves on sliced legs are projected at the slice
// values, the rest reuse the base pointers.
template <class Ops>
std::vector<std::vector<typename Ops::Ptr>> slice_leaves(
    Session& s, const std::vector<std::vector<typename Ops::Ptr>>& base,
    const std::vector<std::vector<Tensor>>& value_sets, const SliceSpec& spec,
    const std::vector<std::uint32_t>& values) {
  auto out = base;
  for (std::size_t j = 0; j < value_sets.size(); ++j) {
    for (std::size_t v = 0; v < value_sets[j].size(); ++v) {
      for (std::size_t x = 0; x < spec.legs.size(); ++x) {
        if (value_sets[j][v].has_leg(spec.legs[x]))
          out[j][v] = Ops::project(s, out[j][v], spec.legs[x], values[x]);
      }
    }
  }
  return out;
}

void add_into(Tensor& acc, const Tensor& t) {
  for (std::size_t i = 0; i < acc.data().size(); ++i)
    acc.data()[i] += t.data()[i];
}

std::vector<Tensor> fan_out(const TupleIndex& ti,
                            const std::vector<Tensor>& by_row) {
  std::vector<Tensor> out;
  out.reserve(ti.row_of_request.size());
  for (int row : ti.row_of_request) out.push_back(by_row[row]);
  return out;
}

}  // namespace

EvalResult eval_naive(const Plan& plan, const NetworkDiagram& d,
                      const AssignmentSet& as, const EvalOptions& opts) {
  check_inputs(plan, d, as);
  if (!plan.sliced.empty())
    throw DataError("eval_naive does not handle sliced plans");
  TupleIndex ti = build_tuple_index(plan, as);

  Session session;
  session.cap = opts.memory_cap_bytes;
  session.node_contractions.assign(plan.nodes.size(), 0);
  {
    auto leaves = wrap_leaves<RealOps>(session, as.value_sets);
    std::map<std::pair<int, std::uint32_t>, RealOps::Ptr> cache;

    auto eval_rec = [&](auto&& self, int node, int row) -> RealOps::Ptr {
      const Plan::Node& nd = plan.nodes[node];
      if (nd.leaf()) return leaves[nd.slot][ti.rows[row][nd.slot]];
      std::pair<int, std::uint32_t> key{node, ti.rank[node][row]};
      auto it = cache.find(key);
      if (it != cache.end()) return it->second;
      RealOps::Ptr ul = self(self, nd.left, row);
      RealOps::Ptr ur = self(self, nd.right, row);
      RealOps::Ptr u = RealOps::contract(session, node, ul, ur);
      ++session.node_contractions[node];
      cache.emplace(key, u);
      return u;
    };

    EvalResult res;
    res.values.reserve(as.request_count());
    for (std::size_t r = 0; r < as.request_count(); ++r)
      res.values.push_back(
          eval_rec(eval_rec, plan.root, ti.row_of_request[r])->tensor());
    cache.clear();
    leaves.clear();
    res.counters = session.counters;
    res.peak_bytes = session.peak;
    res.node_contractions = session.node_contractions;
    return res;
  }
}

EvalResult eval_all(const Plan& plan, const NetworkDiagram& d,
                    const AssignmentSet& as, const EvalOptions& opts) {
  check_inputs(plan, d, as);
  if (!plan.sliced.empty())
    throw DataError("plan has sliced legs; use eval_sliced");
  TupleIndex ti = build_tuple_index(plan, as);

  Session session;
  session.cap = opts.memory_cap_bytes;
  session.node_contractions.assign(plan.nodes.size(), 0);
  std::vector<Tensor> by_row;
  {
    auto leaves = wrap_leaves<RealOps>(session, as.value_sets);
    std::vector<RealOps::Ptr> vals =
        run_once<RealOps>(plan, ti, std::move(leaves), session);
    by_row.reserve(vals.size());
    for (const auto& p : vals) by_row.push_back(p->tensor());
  }
  EvalResult res;
  res.values = fan_out(ti, by_row);
  res.counters = session.counters;
  res.peak_bytes = session.peak;
  res.node_contractions = session.node_contractions;
  return res;
}

EvalResult eval_sliced(const Plan& plan, const NetworkDiagram& d,
                       const AssignmentSet& as, const EvalOptions& opts) {
  check_inputs(plan, d, as);
  if (plan.sliced.empty())
    throw DataError("plan has no sliced legs; use eval_all");
  SliceSpec spec = slice_spec(plan, d);
  TupleIndex ti = build_tuple_index(plan, as);
  const std::size_t rows = ti.row_count();

  int workers = std::max(1, opts.workers);
  std::vector<std::vector<Tensor>> per_slice(spec.count);
  std::vector<Session> sessions(spec.count);

  auto run_slice = [&](std::uint64_t idx) {
    Session& session = sessions[idx];
    session.cap = opts.memory_cap_bytes;
    session.node_contractions.assign(plan.nodes.size(), 0);
    auto base = wrap_leaves<RealOps>(session, as.value_sets);
    auto leaves = slice_leaves<RealOps>(session, base, as.value_sets, spec,
                                        spec.values_of(idx));
    std::vector<RealOps::Ptr> vals =
        run_once<RealOps>(plan, ti, std::move(leaves), session);
    per_slice[idx].reserve(rows);
    for (const auto& p : vals) per_slice[idx].push_back(p->tensor());
  };

  if (workers == 1 || spec.count == 1) {
    for (std::uint64_t idx = 0; idx < spec.count; ++idx) run_slice(idx);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        try {
          for (std::uint64_t idx = w; idx < spec.count; idx += workers)
            run_slice(idx);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  // Deterministic reduction in slice-index order, independent of workers.
  EvalResult res;
  res.node_contractions.assign(plan.nodes.size(), 0);
  std::vector<Tensor> by_row;
  for (std::uint64_t idx = 0; idx < spec.count; ++idx) {
    if (idx == 0) {
      by_row = std::move(per_slice[0]);
    } else {
      for (std::size_t r = 0; r < rows; ++r)
        add_into(by_row[r], per_slice[idx][r]);
    }
    res.counters += sessions[idx].counters;
    res.peak_bytes = std::max(res.peak_bytes, sessions[idx].peak);
    for (std::size_t n = 0; n < plan.nodes.size(); ++n)
      res.node_contractions[n] += sessions[idx].node_contractions[n];
  }
  res.values = fan_out(ti, by_row);
  return res;
}

EmulateResult emulate(const Plan& plan, const NetworkDiagram& d,
                      const AssignmentSet& as, const EvalOptions& opts) {
  check_inputs(plan, d, as);
  TupleIndex ti = build_tuple_index(plan, as);

  EmulateResult res;
  res.node_contractions.assign(plan.nodes.size(), 0);
  if (plan.sliced.empty()) {
    Session session;
    session.cap = opts.memory_cap_bytes;
    session.node_contractions.assign(plan.nodes.size(), 0);
    {
      auto leaves = wrap_leaves<ShapeOps>(session, as.value_sets);
      run_once<ShapeOps>(plan, ti, std::move(leaves), session);
    }
    res.counters = session.counters;
    res.peak_bytes = session.peak;
    res.node_contractions = session.node_contractions;
    return res;
  }

  SliceSpec spec = slice_spec(plan, d);
  for (std::uint64_t idx = 0; idx < spec.count; ++idx) {
    Session session;
    session.cap = opts.memory_cap_bytes;
    session.node_contractions.assign(plan.nodes.size(), 0);
    {
      auto base = wrap_leaves<ShapeOps>(session, as.value_sets);
      auto leaves = slice_leaves<ShapeOps>(session, base, as.value_sets, spec,
                                           spec.values_of(idx));
      run_once<ShapeOps>(plan, ti, std::move(leaves), session);
    }
    res.counters += session.counters;
    res.peak_bytes = std::max(res.peak_bytes, session.peak);
    for (std::size_t n = 0; n < plan.nodes.size(); ++n)
      res.node_contractions[n] += session.node_contractions[n];
  }
  return res;
}

}  // namespace mtc
