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

#include "support/gen.hpp"

#include <cmath>

namespace mtc::test {

Circuit random_circuit(Rng& rng, int n_qubits, int n_gates) {
  static const GateKind one_q[] = {
      GateKind::kH,   GateKind::kX,   GateKind::kY,    GateKind::kZ,
      GateKind::kS,   GateKind::kT,   GateKind::kRz,   GateKind::kX12,
      GateKind::kY12, GateKind::kHz12};
  static const GateKind two_q[] = {GateKind::kCz, GateKind::kCx,
                                   GateKind::kFsim};
  Circuit c;
  c.n_qubits = n_qubits;
  for (int i = 0; i < n_gates; ++i) {
    Gate g;
    g.moment = i;
    bool two = n_qubits >= 2 && rng.uniform_real01() < 0.5;
    if (two) {
      g.kind = two_q[rng.uniform_index(3)];
      g.q0 = static_cast<int>(rng.uniform_index(n_qubits));
      do {
        g.q1 = static_cast<int>(rng.uniform_index(n_qubits));
      } while (g.q1 == g.q0);
    } else {
      g.kind = one_q[rng.uniform_index(10)];
      g.q0 = static_cast<int>(rng.uniform_index(n_qubits));
      g.q1 = -1;
    }
    if (gate_param_count(g.kind) >= 1)
      g.p0 = rng.uniform_real01() * 2.0 * M_PI;
    if (gate_param_count(g.kind) >= 2)
      g.p1 = rng.uniform_real01() * 2.0 * M_PI;
    c.gates.push_back(g);
  }
  return c;
}

Circuit grid_circuit(int rows, int cols, int layers, std::uint64_t seed) {
  Rng rng(seed);
  static const GateKind one_q[] = {GateKind::kX12, GateKind::kY12,
                                   GateKind::kHz12};
  Circuit c;
  c.n_qubits = rows * cols;
  int moment = 0;
  for (int layer = 0; layer < layers; ++layer) {
    for (int q = 0; q < c.n_qubits; ++q) {
      Gate g;
      g.moment = moment;
      g.kind = one_q[rng.uniform_index(3)];
      g.q0 = q;
      c.gates.push_back(g);
    }
    ++moment;
    int dir = layer % 4;
    auto add_pair = [&](int a, int b) {
      Gate g;
      g.moment = moment;
      g.kind = GateKind::kFsim;
      g.q0 = a;
      g.q1 = b;
      g.p0 = M_PI / 2;
      g.p1 = M_PI / 6;
      c.gates.push_back(g);
    };
    if (dir == 0 || dir == 2) {
      int start = dir == 0 ? 0 : 1;
      for (int r = 0; r < rows; ++r)
        for (int col = start; col + 1 < cols; col += 2)
          add_pair(r * cols + col, r * cols + col + 1);
    } else {
      int start = dir == 1 ? 0 : 1;
      for (int r = start; r + 1 < rows; r += 2)
        for (int col = 0; col < cols; ++col)
          add_pair(r * cols + col, (r + 1) * cols + col);
    }
    ++moment;
  }
  return c;
}

std::vector<std::string> random_bitstrings(Rng& rng, int n_qubits, int count) {
  std::vector<std::string> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    std::string s(n_qubits, '0');
    for (int q = 0; q < n_qubits; ++q)
      if (rng.coin_flip()) s[q] = '1';
    out.push_back(std::move(s));
  }
  return out;
}

Circuit ghz_like_circuit() {
  return parse_circuit(std::string("3\n") + "0 h 0\n0 t 2\n1 cx 0 1\n" +
                       "2 cx 1 2\n3 h 0\n3 h 1\n");
}

const char* kGhzPlanText = "(((0 3) (1 5)) ((2 4) (6 8))) 7\nslice:\n";

}  // namespace mtc::test
