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

#include "mtc/optimizer.hpp"

#include <cmath>
#include <limits>

#include "mtc/errors.hpp"

namespace mtc {

Plan local_transform(const Plan& p, int node, int rule) {
  if (node < 0 || static_cast<std::size_t>(node) >= p.nodes.size())
    throw DataError("rewrite node out of range");
  if (rule < 1 || rule > 4) throw DataError("rewrite rule must be 1..4");
  Plan q = p;
  Plan::Node& top = q.nodes[node];
  if (top.leaf()) throw DataError("rewrite target is a leaf");
  int child = (rule <= 2) ? top.left : top.right;
  if (child < 0 || q.nodes[child].leaf())
    throw DataError("rewrite pattern mismatch at node " +
                    std::to_string(node));
  Plan::Node& mid = q.nodes[child];
  switch (rule) {
    case 1:  // (a*b)*c -> (c*b)*a
      std::swap(mid.left, top.right);
      break;
    case 2:  // (a*b)*c -> (a*c)*b
      std::swap(mid.right, top.right);
      break;
    case 3:  // a*(b*c) -> c*(b*a)
      std::swap(mid.right, top.left);
      break;
    case 4:  // a*(b*c) -> b*(a*c)
      std::swap(mid.left, top.left);
      break;
  }
  return q;
}

void slicing_move(CostedPlan& cp, Rng& rng) {
  if (rng.coin_flip()) {
    // Add the leg with the best memory reduction.
    double base = cp.memory_estimate_bytes();
    double best = base;
    LegId best_leg = 0;
    bool found = false;
    for (LegId l = 0; l < cp.leg_count(); ++l) {
      if (!cp.leg_sliceable(l)) continue;
      CostedPlan probe = cp;
      probe.add_slice(l);
      double m = probe.memory_estimate_bytes();
      if (!found || m < best) {
        best = m;
        best_leg = l;
        found = true;
      }
    }
    if (found) cp.add_slice(best_leg);
  } else {
    const std::vector<LegId>& s = cp.plan().sliced;
    if (s.empty()) return;
    cp.remove_slice(s[rng.uniform_index(s.size())]);
  }
}

AnnealResult anneal(const NetworkDiagram& d, const ValueCounts& counts,
                    const CostConfig& cfg, const SearchConfig& sc) {
  const std::size_t m = d.slot_count();
  Plan init = left_deep_plan(m);

  auto summarize = [&](const Plan& p) {
    CostedPlan cp(p, d, cfg, counts);
    AnnealResult r;
    r.plan = p;
    r.objective = m > 1 ? cp.objective() : 0.0;
    r.total_cost = cp.total_cost();
    r.total_rw = cp.total_rw();
    r.memory_estimate_bytes = cp.memory_estimate_bytes();
    return r;
  };
  if (m < 2 || sc.steps == 0) return summarize(init);

  double decay = sc.decay;
  if (decay <= 0.0) {
    decay = (sc.steps > 1 && sc.temp_init > 0.0 && sc.temp_final > 0.0)
                ? std::pow(sc.temp_final / sc.temp_init,
                           1.0 / static_cast<double>(sc.steps - 1))
                : 1.0;
  }

  Plan best_plan = init;
  double best_f = std::numeric_limits<double>::infinity();
  const bool rewrites_possible = m >= 3;  // with 2 leaves no pattern matches

  for (std::uint32_t chain = 0; chain < sc.chains; ++chain) {
    Rng rng(Rng::derive_seed(sc.seed, chain));
    CostedPlan cp(init, d, cfg, counts);
    double f = cp.objective();
    if (f < best_f) {
      best_f = f;
      best_plan = cp.plan();
    }
    double temp = sc.temp_init;
    for (std::uint64_t step = 1; step <= sc.steps; ++step) {
      if (rewrites_possible) {
        Rewrite rw;
        do {
          rw.node = static_cast<int>(rng.uniform_index(cp.node_count()));
          rw.rule = static_cast<int>(1 + rng.uniform_index(4));
        } while (!cp.applicable(rw));
        cp.apply(rw);
        double f_new = cp.objective();
        double gain = f - f_new;
        bool accept = gain >= 0.0;
        if (!accept && temp > 0.0)
          accept = rng.uniform_real01() < std::exp(gain / temp);
        if (accept) {
          f = f_new;
          if (f < best_f) {
            best_f = f;
            best_plan = cp.plan();
          }
        } else {
          cp.apply(rw);  // the rules are involutions
        }
      }
      if (sc.slice_interval > 0 && step % sc.slice_interval == 0) {
        slicing_move(cp, rng);
        f = cp.objective();
        if (f < best_f) {
          best_f = f;
          best_plan = cp.plan();
        }
      }
      temp *= decay;
    }
  }
  return summarize(best_plan);
}

}  // namespace mtc
