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

#include "mtc/diagram.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "mtc/errors.hpp"

namespace mtc {

namespace {

using Mat2 = std::array<Complex, 4>;   // row-major 2x2
using Mat4 = std::array<Complex, 16>;  // row-major 4x4

Mat2 mat2_mul(const Mat2& a, const Mat2& b) {
  Mat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      r[i * 2 + j] = a[i * 2 + 0] * b[0 * 2 + j] + a[i * 2 + 1] * b[1 * 2 + j];
  return r;
}

// u * (pa ⊗ pb) in the |q0 q1> basis.
Mat4 absorb_inputs(const Mat4& u, const Mat2& pa, const Mat2& pb) {
  Mat4 kron{};
  for (int ra = 0; ra < 2; ++ra)
    for (int rb = 0; rb < 2; ++rb)
      for (int ca = 0; ca < 2; ++ca)
        for (int cb = 0; cb < 2; ++cb)
          kron[(ra * 2 + rb) * 4 + (ca * 2 + cb)] =
              pa[ra * 2 + ca] * pb[rb * 2 + cb];
  Mat4 r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Complex acc = 0;
      for (int m = 0; m < 4; ++m) acc += u[i * 4 + m] * kron[m * 4 + j];
      r[i * 4 + j] = acc;
    }
  return r;
}

Tensor one_qubit_tensor(const Mat2& u, LegId out, LegId in) {
  std::vector<Complex> data(4);
  for (int o = 0; o < 2; ++o)
    for (int c = 0; c < 2; ++c) data[o * 2 + c] = u[o * 2 + c];
  return Tensor({{out, 2}, {in, 2}}, std::move(data));
}

Tensor two_qubit_tensor(const Mat4& u, LegId a_out, LegId b_out, LegId a_in,
                        LegId b_in) {
  std::vector<Complex> data(16);
  for (int ao = 0; ao < 2; ++ao)
    for (int bo = 0; bo < 2; ++bo)
      for (int ai = 0; ai < 2; ++ai)
        for (int bi = 0; bi < 2; ++bi)
          data[((ao * 2 + bo) * 2 + ai) * 2 + bi] =
              u[(ao * 2 + bo) * 4 + (ai * 2 + bi)];
  return Tensor({{a_out, 2}, {b_out, 2}, {a_in, 2}, {b_in, 2}},
                std::move(data));
}

Mat2 mat2_of(const Gate& g) {
  std::vector<Complex> m = gate_matrix(g);
  return {m[0], m[1], m[2], m[3]};
}

Mat4 mat4_of(const Gate& g) {
  std::vector<Complex> m = gate_matrix(g);
  Mat4 r;
  std::copy_n(m.begin(), 16, r.begin());
  return r;
}

struct Builder {
  int n_qubits;
  LegId next_leg;
  std::vector<LegId> wire;  // current output leg per qubit
  std::vector<Tensor> slots;

  explicit Builder(int n) : n_qubits(n), next_leg(static_cast<LegId>(n)) {
    wire.resize(n);
    for (int q = 0; q < n; ++q) {
      wire[q] = static_cast<LegId>(q);
      slots.push_back(Tensor({{wire[q], 2}}, {1.0, 0.0}));
    }
  }

  void add_1q(const Mat2& m, int q) {
    LegId out = next_leg++;
    slots.push_back(one_qubit_tensor(m, out, wire[q]));
    wire[q] = out;
  }

  int add_2q(const Mat4& m, int a, int b) {
    LegId ao = next_leg++;
    LegId bo = next_leg++;
    slots.push_back(two_qubit_tensor(m, ao, bo, wire[a], wire[b]));
    wire[a] = ao;
    wire[b] = bo;
    return static_cast<int>(slots.size()) - 1;
  }

  // Applies m to the output side of slot's leg wire[q].
  void absorb_output(int slot, const Mat2& m, int q) {
    LegId out = next_leg++;
    Tensor p = one_qubit_tensor(m, out, wire[q]);
    std::array<LegId, 1> closed{wire[q]};
    slots[slot] = contract_pair(slots[slot], p, closed);
    wire[q] = out;
  }

  NetworkDiagram finish() {
    // Renumber so that closed legs come first and the open leg of qubit q is
    // n_closed + q. Fusion can orphan wire legs (absorbed contractions close
    // them away); those ids are dropped.
    std::vector<bool> used(next_leg, false);
    for (const Tensor& t : slots)
      for (const Leg& l : t.legs()) used[l.id] = true;
    std::vector<bool> open(next_leg, false);
    for (int q = 0; q < n_qubits; ++q) open[wire[q]] = true;
    std::vector<LegId> remap(next_leg);
    LegId n_closed = 0;
    for (LegId l = 0; l < next_leg; ++l)
      if (used[l] && !open[l]) remap[l] = n_closed++;
    for (int q = 0; q < n_qubits; ++q) remap[wire[q]] = n_closed + q;

    NetworkDiagram d;
    d.n_qubits = n_qubits;
    d.n_closed = n_closed;
    d.leg_dims.assign(n_closed + n_qubits, 2);
    d.open_legs.resize(n_qubits);
    for (int q = 0; q < n_qubits; ++q) d.open_legs[q] = n_closed + q;
    d.slot_open_legs.resize(slots.size());
    for (std::size_t j = 0; j < slots.size(); ++j) {
      std::vector<Leg> legs = slots[j].legs();
      for (Leg& l : legs) l.id = remap[l.id];
      d.slot_tensors.push_back(Tensor(legs, slots[j].data()));
      for (const Leg& l : legs)
        if (l.id >= n_closed) d.slot_open_legs[j].push_back(l.id);
      std::sort(d.slot_open_legs[j].begin(), d.slot_open_legs[j].end());
    }
    validate_diagram(d);
    return d;
  }
};

}  // namespace

NetworkDiagram to_diagram(const Circuit& c, bool fuse) {
  Builder b(c.n_qubits);
  if (!fuse) {
    for (const Gate& g : c.gates) {
      if (g.arity() == 1)
        b.add_1q(mat2_of(g), g.q0);
      else
        b.add_2q(mat4_of(g), g.q0, g.q1);
    }
    return b.finish();
  }

  const Mat2 id2{1, 0, 0, 1};
  std::vector<Mat2> pending(c.n_qubits, id2);
  std::vector<bool> active(c.n_qubits, false);
  std::vector<int> last_2q(c.n_qubits, -1);

  for (const Gate& g : c.gates) {
    if (g.arity() == 1) {
      pending[g.q0] = mat2_mul(mat2_of(g), pending[g.q0]);
      active[g.q0] = true;
      continue;
    }
    Mat4 u = mat4_of(g);
    if (active[g.q0] || active[g.q1])
      u = absorb_inputs(u, active[g.q0] ? pending[g.q0] : id2,
                        active[g.q1] ? pending[g.q1] : id2);
    int slot = b.add_2q(u, g.q0, g.q1);
    for (int q : {g.q0, g.q1}) {
      pending[q] = id2;
      active[q] = false;
      last_2q[q] = slot;
    }
  }
  // Trailing runs: absorb into the preceding two-qubit gate when there is
  // one, otherwise emit the merged run as its own slot.
  for (int q = 0; q < c.n_qubits; ++q) {
    if (!active[q]) continue;
    if (last_2q[q] >= 0)
      b.absorb_output(last_2q[q], pending[q], q);
    else
      b.add_1q(pending[q], q);
  }
  return b.finish();
}

void validate_diagram(const NetworkDiagram& d) {
  std::vector<int> uses(d.leg_count(), 0);
  for (const Tensor& t : d.slot_tensors)
    for (const Leg& l : t.legs()) {
      if (l.id >= d.leg_count()) throw DataError("leg id out of range");
      if (l.dim != d.leg_dims[l.id]) throw DataError("leg dim conflict");
      ++uses[l.id];
    }
  for (LegId l = 0; l < d.leg_count(); ++l) {
    int expected = d.is_open(l) ? 1 : 2;
    if (uses[l] != expected)
      throw DataError("leg " + std::to_string(l) + " connects " +
                      std::to_string(uses[l]) + " slots, expected " +
                      std::to_string(expected));
  }
  if (d.open_legs.size() != static_cast<std::size_t>(d.n_qubits))
    throw DataError("open leg count does not match qubit count");
}

AssignmentSet build_assignments(const NetworkDiagram& d,
                                const std::vector<std::string>& bitstrings,
                                const std::vector<LegId>& batch_legs) {
  AssignmentSet as;
  as.batch_legs = batch_legs;
  std::sort(as.batch_legs.begin(), as.batch_legs.end());
  for (LegId l : as.batch_legs)
    if (!d.is_open(l))
      throw DataError("batch leg " + std::to_string(l) + " is not open");

  std::vector<bool> is_batch_pos(d.n_qubits, false);
  for (LegId l : as.batch_legs) is_batch_pos[d.qubit_of(l)] = true;

  const std::size_t n = static_cast<std::size_t>(d.n_qubits);
  for (std::size_t i = 0; i < bitstrings.size(); ++i) {
    const std::string& s = bitstrings[i];
    if (s.size() != n)
      throw DataError("bitstring '" + s + "' has length " +
                      std::to_string(s.size()) + ", expected " +
                      std::to_string(n));
    for (std::size_t q = 0; q < n; ++q) {
      char ch = s[q];
      if (ch != '0' && ch != '1' && ch != '*')
        throw DataError("bitstring '" + s + "' has invalid character '" +
                        std::string(1, ch) + "'");
      if ((ch == '*') != is_batch_pos[q])
        throw DataError("bitstring '" + s + "' position " + std::to_string(q) +
                        (ch == '*' ? " is '*' but not a batch position"
                                   : " must be '*' (batch position)"));
    }
  }
  as.request_keys = bitstrings;

  const std::size_t m = d.slot_count();
  as.value_sets.resize(m);
  as.tuples.assign(bitstrings.size(), std::vector<std::uint32_t>(m, 0));

  for (std::size_t j = 0; j < m; ++j) {
    std::vector<LegId> fixed;
    for (LegId l : d.slot_open_legs[j])
      if (!is_batch_pos[d.qubit_of(l)]) fixed.push_back(l);

    if (fixed.empty() || bitstrings.empty()) {
      as.value_sets[j].push_back(d.slot_tensors[j]);
      continue;
    }
    // Distinct fixed-bit tuples among the requests, ascending.
    std::map<std::vector<std::uint32_t>, std::uint32_t> seen;
    std::vector<std::vector<std::uint32_t>> per_request(bitstrings.size());
    for (std::size_t i = 0; i < bitstrings.size(); ++i) {
      std::vector<std::uint32_t> bits;
      for (LegId l : fixed)
        bits.push_back(bitstrings[i][d.qubit_of(l)] == '1' ? 1u : 0u);
      per_request[i] = bits;
      seen.emplace(std::move(bits), 0);
    }
    std::uint32_t v = 0;
    for (auto& [bits, idx] : seen) {
      idx = v++;
      Tensor t = d.slot_tensors[j];
      for (std::size_t f = 0; f < fixed.size(); ++f)
        t = project_leg(t, fixed[f], bits[f]);
      as.value_sets[j].push_back(std::move(t));
    }
    for (std::size_t i = 0; i < bitstrings.size(); ++i)
      as.tuples[i][j] = seen.at(per_request[i]);
  }
  return as;
}

}  // namespace mtc
