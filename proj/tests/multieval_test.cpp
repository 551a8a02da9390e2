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

#include <cmath>
#include <set>

#include "doctest.h"
#include "mtc/errors.hpp"
#include "support/gen.hpp"
#include "support/oracle.hpp"

using namespace mtc;

namespace {

Plan random_plan(Rng& rng, std::size_t n_slots) {
  Plan p;
  std::vector<int> roots;
  for (std::size_t s = 0; s < n_slots; ++s) {
    p.nodes.push_back({-1, -1, static_cast<int>(s)});
    roots.push_back(static_cast<int>(s));
  }
  while (roots.size() > 1) {
    std::size_t i = rng.uniform_index(roots.size());
    int a = roots[i];
    roots.erase(roots.begin() + i);
    std::size_t j = rng.uniform_index(roots.size());
    int b = roots[j];
    roots.erase(roots.begin() + j);
    p.nodes.push_back({a, b, -1});
    roots.push_back(static_cast<int>(p.nodes.size()) - 1);
  }
  p.root = roots[0];
  return p;
}

int find_node(const Plan& p, const std::set<int>& slots) {
  auto leaves = [&](auto&& self, int n, std::set<int>& out) -> void {
    if (p.nodes[n].leaf()) {
      out.insert(p.nodes[n].slot);
      return;
    }
    self(self, p.nodes[n].left, out);
    self(self, p.nodes[n].right, out);
  };
  for (std::size_t n = 0; n < p.nodes.size(); ++n) {
    std::set<int> s;
    leaves(leaves, static_cast<int>(n), s);
    if (s == slots) return static_cast<int>(n);
  }
  return -1;
}

bool bit_equal(const Tensor& x, const Tensor& y) {
  if (!(x.legs() == y.legs())) return false;
  for (std::size_t i = 0; i < x.data().size(); ++i)
    if (x.data()[i] != y.data()[i]) return false;
  return true;
}

constexpr double kGoldenAmp = 0.35355339059327373;  // 1/(2*sqrt(2))

}  // namespace

TEST_CASE("worked example: three amplitudes, one left and two right passes") {
  NetworkDiagram d = to_diagram(test::ghz_like_circuit(), false);
  Plan plan = parse_plan(test::kGhzPlanText);
  AssignmentSet as = build_assignments(d, {"000", "100", "111"}, {});

  EvalResult naive = eval_naive(plan, d, as);
  EvalResult all = eval_all(plan, d, as);
  REQUIRE(all.values.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(all.values[i].data()[0] - Complex{kGoldenAmp, 0}) < 1e-12);
    CHECK(bit_equal(all.values[i], naive.values[i]));
  }

  int left_interior = find_node(plan, {0, 3, 1, 5});
  int right_interior = find_node(plan, {2, 4, 6, 8});
  CHECK(all.node_contractions[left_interior] == 1);
  CHECK(all.node_contractions[right_interior] == 2);
  CHECK(all.node_contractions[plan.root] == 3);

  // Counts never exceed the bound, and the exact cost model reproduces the
  // instrumented operation totals.
  CostConfig cfg;
  cfg.k = 3;
  CostedPlan bound(plan, d, cfg, bound_value_counts(d, {}, 3));
  CostedPlan exact(plan, d, cfg, exact_value_counts(as), &as);
  u128 total = 0;
  for (std::size_t n = 0; n < plan.nodes.size(); ++n) {
    CHECK(all.node_contractions[n] <= bound.node(static_cast<int>(n)).k_t);
    if (plan.nodes[n].leaf())
      CHECK(all.node_contractions[n] == 0);
    else
      CHECK(all.node_contractions[n] == exact.node(static_cast<int>(n)).k_t);
    total += all.node_contractions[n];
  }
  CHECK(total == 13);  // vs 3 x 8 for three independent runs
  CHECK(static_cast<u128>(all.counters.mults) == exact.total_mults());
  CHECK(static_cast<u128>(all.counters.adds) == exact.total_adds());
  CHECK(static_cast<u128>(all.counters.rw) == exact.total_rw());
}

TEST_CASE("eval_all matches eval_naive bit for bit") {
  Rng rng(4711);
  for (int rep = 0; rep < 30; ++rep) {
    int n = 2 + static_cast<int>(rng.uniform_index(5));
    Circuit c = test::random_circuit(rng, n, 18);
    NetworkDiagram d = to_diagram(c, rep % 2 == 0);
    Plan plan = random_plan(rng, d.slot_count());
    int k = 1 + static_cast<int>(rng.uniform_index(10));
    AssignmentSet as =
        build_assignments(d, test::random_bitstrings(rng, n, k), {});
    EvalResult a = eval_all(plan, d, as);
    EvalResult b = eval_naive(plan, d, as);
    REQUIRE(a.values.size() == b.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i)
      CHECK(bit_equal(a.values[i], b.values[i]));
    // And against fully independent single-request evaluations.
    for (std::size_t i = 0; i < as.request_count(); ++i) {
      AssignmentSet one = build_assignments(d, {as.request_keys[i]}, {});
      EvalResult single = eval_all(plan, d, one);
      CHECK(std::abs(single.values[0].data()[0] - a.values[i].data()[0]) <
            1e-12);
    }
  }
}

TEST_CASE("per-node contraction counts respect the k_t bound") {
  Rng rng(31337);
  for (int rep = 0; rep < 20; ++rep) {
    int n = 2 + static_cast<int>(rng.uniform_index(4));
    Circuit c = test::random_circuit(rng, n, 14);
    NetworkDiagram d = to_diagram(c, false);
    Plan plan = random_plan(rng, d.slot_count());
    int k = 1 + static_cast<int>(rng.uniform_index(12));
    AssignmentSet as =
        build_assignments(d, test::random_bitstrings(rng, n, k), {});
    EvalResult r = eval_all(plan, d, as);
    CostConfig cfg;
    cfg.k = exact_value_counts(as).k;
    CostedPlan bound(plan, d, cfg, bound_value_counts(d, {}, cfg.k));
    for (std::size_t nd = 0; nd < plan.nodes.size(); ++nd)
      CHECK(r.node_contractions[nd] <= bound.node(static_cast<int>(nd)).k_t);
  }
}

TEST_CASE("duplicate requests are evaluated once and fanned out") {
  NetworkDiagram d = to_diagram(test::ghz_like_circuit(), false);
  Plan plan = parse_plan(test::kGhzPlanText);
  AssignmentSet dup = build_assignments(d, {"101", "101", "101"}, {});
  AssignmentSet one = build_assignments(d, {"101"}, {});
  EvalResult rd = eval_all(plan, d, dup);
  EvalResult r1 = eval_all(plan, d, one);
  REQUIRE(rd.values.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(bit_equal(rd.values[i], rd.values[0]));
  CHECK(rd.counters == r1.counters);
  CHECK(rd.node_contractions == r1.node_contractions);
}

TEST_CASE("a single request contracts every node exactly once") {
  Rng rng(9);
  Circuit c = test::random_circuit(rng, 4, 12);
  NetworkDiagram d = to_diagram(c, false);
  Plan plan = random_plan(rng, d.slot_count());
  AssignmentSet as = build_assignments(d, {"0110"}, {});
  EvalResult r = eval_all(plan, d, as);
  for (std::size_t n = 0; n < plan.nodes.size(); ++n)
    CHECK(r.node_contractions[n] == (plan.nodes[n].leaf() ? 0u : 1u));
}

TEST_CASE("batch evaluation expands to the single-amplitude results") {
  Circuit c = parse_circuit(std::string("3\n0 h 0\n0 h 2\n1 cx 0 1\n2 fs 1 2 "
                                        "0.7 0.3\n"));
  NetworkDiagram d = to_diagram(c, false);
  Plan plan = left_deep_plan(d.slot_count());
  LegId q1 = d.open_legs[1];
  AssignmentSet batch = build_assignments(d, {"0*0", "1*1"}, {q1});
  EvalResult rb = eval_all(plan, d, batch);
  REQUIRE(rb.values.size() == 2);
  REQUIRE(rb.values[0].legs() == std::vector<Leg>{{q1, 2}});
  test::StateVector sv(3);
  sv.run(c);
  CHECK(std::abs(rb.values[0].data()[0] - sv.amplitude("000")) < 1e-12);
  CHECK(std::abs(rb.values[0].data()[1] - sv.amplitude("010")) < 1e-12);
  CHECK(std::abs(rb.values[1].data()[0] - sv.amplitude("101")) < 1e-12);
  CHECK(std::abs(rb.values[1].data()[1] - sv.amplitude("111")) < 1e-12);
}

TEST_CASE("random batches agree with the state-vector reference") {
  Rng rng(2468);
  for (int rep = 0; rep < 10; ++rep) {
    int n = 3 + static_cast<int>(rng.uniform_index(3));
    Circuit c = test::random_circuit(rng, n, 15);
    NetworkDiagram d = to_diagram(c, false);
    int batch_q = static_cast<int>(rng.uniform_index(n));
    std::vector<LegId> batch{d.open_legs[batch_q]};
    std::vector<std::string> bits = test::random_bitstrings(rng, n, 3);
    for (std::string& b : bits) b[batch_q] = '*';
    AssignmentSet as = build_assignments(d, bits, batch);
    Plan plan = random_plan(rng, d.slot_count());
    EvalResult r = eval_all(plan, d, as);
    test::StateVector sv(n);
    sv.run(c);
    for (std::size_t i = 0; i < bits.size(); ++i) {
      for (std::uint32_t v = 0; v < 2; ++v) {
        std::string full = bits[i];
        full[batch_q] = v ? '1' : '0';
        CHECK(std::abs(r.values[i].data()[v] - sv.amplitude(full)) < 1e-12);
      }
    }
  }
}

TEST_CASE("slicing works under open batch legs") {
  Rng rng(1357);
  Circuit c = test::random_circuit(rng, 4, 14);
  NetworkDiagram d = to_diagram(c, false);
  std::vector<LegId> batch{d.open_legs[2]};
  std::vector<std::string> bits{"00*1", "10*0", "11*1"};
  AssignmentSet as = build_assignments(d, bits, batch);
  Plan plan = random_plan(rng, d.slot_count());
  EvalResult whole = eval_all(plan, d, as);

  Plan sliced = plan;
  sliced.sliced = {0, 1};
  EvalResult part = eval_sliced(sliced, d, as);
  EmulateResult em = emulate(sliced, d, as);
  CHECK(em.counters == part.counters);
  CHECK(em.peak_bytes == part.peak_bytes);
  for (std::size_t i = 0; i < bits.size(); ++i)
    for (int v = 0; v < 2; ++v)
      CHECK(std::abs(part.values[i].data()[v] - whole.values[i].data()[v]) <
            1e-12);
}

TEST_CASE("sliced evaluation equals the unsliced result") {
  Rng rng(1212);
  for (int rep = 0; rep < 12; ++rep) {
    int n = 2 + static_cast<int>(rng.uniform_index(4));
    Circuit c = test::random_circuit(rng, n, 14);
    NetworkDiagram d = to_diagram(c, false);
    Plan plan = random_plan(rng, d.slot_count());
    AssignmentSet as = build_assignments(
        d, test::random_bitstrings(rng, n, 4), {});
    EvalResult whole = eval_all(plan, d, as);

    Plan sliced = plan;
    int n_slices = 1 + static_cast<int>(rng.uniform_index(3));
    for (int s = 0; s < n_slices; ++s) {
      LegId leg;
      do {
        leg = static_cast<LegId>(rng.uniform_index(d.n_closed));
      } while (std::find(sliced.sliced.begin(), sliced.sliced.end(), leg) !=
               sliced.sliced.end());
      sliced.sliced.push_back(leg);
    }
    EvalResult part = eval_sliced(sliced, d, as);
    for (std::size_t i = 0; i < as.request_count(); ++i)
      CHECK(std::abs(part.values[i].data()[0] - whole.values[i].data()[0]) <
            1e-12);

    EvalOptions four;
    four.workers = 4;
    EvalResult par = eval_sliced(sliced, d, as, four);
    for (std::size_t i = 0; i < as.request_count(); ++i)
      CHECK(bit_equal(par.values[i], part.values[i]));
  }
}

TEST_CASE("slicing every closed leg of a two-tensor network sums products") {
  Circuit c = parse_circuit(std::string("1\n0 h 0\n"));
  NetworkDiagram d = to_diagram(c, false);  // |0> -- h -- open
  REQUIRE(d.n_closed == 1);
  Plan plan = parse_plan("0 1\nslice: 0\n");
  AssignmentSet as = build_assignments(d, {"0"}, {});
  EvalResult r = eval_sliced(plan, d, as);
  // <0|H|0> = sum_v H[0,v] <v|0>
  CHECK(std::abs(r.values[0].data()[0] - Complex{1 / std::sqrt(2.0), 0}) <
        1e-12);
  CHECK_THROWS_AS(eval_sliced(parse_plan("0 1"), d, as), DataError);
  CHECK_THROWS_AS(eval_all(plan, d, as), DataError);
  CHECK_THROWS_AS(eval_sliced(parse_plan("0 1\nslice: 0 0\n"), d, as),
                  DataError);
}

TEST_CASE("emulation reproduces real runs exactly") {
  Rng rng(606);
  for (int rep = 0; rep < 25; ++rep) {
    int n = 2 + static_cast<int>(rng.uniform_index(4));
    Circuit c = test::random_circuit(rng, n, 16);
    NetworkDiagram d = to_diagram(c, rep % 2 == 0);
    Plan plan = random_plan(rng, d.slot_count());
    int k = 1 + static_cast<int>(rng.uniform_index(8));
    AssignmentSet as =
        build_assignments(d, test::random_bitstrings(rng, n, k), {});
    if (rep % 3 == 0) plan.sliced.push_back(rng.uniform_index(d.n_closed));

    EmulateResult em = emulate(plan, d, as);
    EvalResult real = plan.sliced.empty() ? eval_all(plan, d, as)
                                          : eval_sliced(plan, d, as);
    CHECK(em.counters == real.counters);
    CHECK(em.peak_bytes == real.peak_bytes);
    CHECK(em.node_contractions == real.node_contractions);
  }
}

TEST_CASE("a lone leaf plan allocates the leaf and does no work") {
  Circuit c;
  c.n_qubits = 1;
  NetworkDiagram d = to_diagram(c, false);
  AssignmentSet as = build_assignments(d, {"0"}, {});
  EmulateResult em = emulate(parse_plan("(0)"), d, as);
  CHECK(em.counters.mults == 0);
  CHECK(em.counters.adds == 0);
  CHECK(em.peak_bytes == 1 * sizeof(Complex));  // the projected |0> scalar
}

TEST_CASE("the memory cap aborts with the offending node") {
  Rng rng(77);
  Circuit c = test::random_circuit(rng, 5, 20);
  NetworkDiagram d = to_diagram(c, false);
  Plan plan = left_deep_plan(d.slot_count());
  AssignmentSet as =
      build_assignments(d, test::random_bitstrings(rng, 5, 3), {});
  EvalOptions tight;
  tight.memory_cap_bytes = 256;
  CHECK_THROWS_AS(eval_all(plan, d, as, tight), MemoryCapError);
  try {
    eval_all(plan, d, as, tight);
  } catch (const MemoryCapError& e) {
    CHECK(std::string(e.what()).find("memory cap exceeded") !=
          std::string::npos);
  }
}

TEST_CASE("the memory heuristic tracks the exact peak on the worked example") {
  NetworkDiagram d = to_diagram(test::ghz_like_circuit(), false);
  Plan plan = parse_plan(test::kGhzPlanText);
  AssignmentSet as = build_assignments(d, {"000", "100", "111"}, {});
  CostConfig cfg;
  cfg.k = 3;
  CostedPlan exact(plan, d, cfg, exact_value_counts(as), &as);
  EmulateResult em = emulate(plan, d, as);
  double heur = exact.memory_estimate_bytes();
  CHECK(heur <= 4.0 * static_cast<double>(em.peak_bytes));
  CHECK(heur >= 0.25 * static_cast<double>(em.peak_bytes));
}
