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

#include "support/oracle.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace mtc::test {

namespace {

using Mat2 = std::array<Complex, 4>;
using Mat4 = std::array<Complex, 16>;

const Complex kI{0.0, 1.0};
const double kS2 = 1.0 / std::sqrt(2.0);

Mat2 one_qubit_unitary(const Gate& g) {
  switch (g.kind) {
    case GateKind::kH:
      return {kS2, kS2, kS2, -kS2};
    case GateKind::kX:
      return {0, 1, 1, 0};
    case GateKind::kY:
      return {0, -kI, kI, 0};
    case GateKind::kZ:
      return {1, 0, 0, -1};
    case GateKind::kS:
      return {1, 0, 0, kI};
    case GateKind::kT:
      return {1, 0, 0, Complex{kS2, kS2}};
    case GateKind::kRz: {
      double h = g.p0 / 2;
      return {Complex{std::cos(h), -std::sin(h)}, 0, 0,
              Complex{std::cos(h), std::sin(h)}};
    }
    case GateKind::kX12: {
      // exp(i pi/4) * exp(-i (pi/4) X)
      Complex ph{kS2, kS2};
      Complex c = ph * kS2;
      return {c, c * (-kI), c * (-kI), c};
    }
    case GateKind::kY12: {
      Complex ph{kS2, kS2};
      Complex c = ph * kS2;
      return {c, -c, c, c};
    }
    case GateKind::kHz12: {
      // exp(i pi/4) * exp(-i (pi/4) (X+Y)/sqrt(2))
      Complex ph{kS2, kS2};
      Complex c = ph * kS2;
      Complex em{kS2, -kS2};  // exp(-i pi/4)
      Complex ep{kS2, kS2};   // exp(+i pi/4)
      return {c, c * (-kI) * em, c * (-kI) * ep, c};
    }
    default:
      throw std::logic_error("not a one-qubit gate");
  }
}

Mat4 two_qubit_unitary(const Gate& g) {
  switch (g.kind) {
    case GateKind::kCz:
      return {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1};
    case GateKind::kCx:
      return {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0};
    case GateKind::kFsim: {
      double c = std::cos(g.p0), s = std::sin(g.p0);
      Mat4 u{};
      u[0] = 1;
      u[5] = c;
      u[6] = -kI * s;
      u[9] = -kI * s;
      u[10] = c;
      u[15] = Complex{std::cos(g.p1), -std::sin(g.p1)};
      return u;
    }
    default:
      throw std::logic_error("not a two-qubit gate");
  }
}

}  // namespace

StateVector::StateVector(int n_qubits) : n_(n_qubits) {
  state_.assign(std::size_t{1} << n_, Complex{});
  state_[0] = 1.0;
}

void StateVector::apply(const Gate& g) {
  const std::size_t dim = state_.size();
  if (g.arity() == 1) {
    Mat2 u = one_qubit_unitary(g);
    const std::size_t bit = std::size_t{1} << (n_ - 1 - g.q0);
    for (std::size_t i = 0; i < dim; ++i) {
      if (i & bit) continue;
      Complex a0 = state_[i], a1 = state_[i | bit];
      state_[i] = u[0] * a0 + u[1] * a1;
      state_[i | bit] = u[2] * a0 + u[3] * a1;
    }
    return;
  }
  Mat4 u = two_qubit_unitary(g);
  const std::size_t ba = std::size_t{1} << (n_ - 1 - g.q0);
  const std::size_t bb = std::size_t{1} << (n_ - 1 - g.q1);
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & ba) || (i & bb)) continue;
    std::array<std::size_t, 4> idx{i, i | bb, i | ba, i | ba | bb};
    std::array<Complex, 4> v{state_[idx[0]], state_[idx[1]], state_[idx[2]],
                             state_[idx[3]]};
    for (int r = 0; r < 4; ++r) {
      Complex acc = 0;
      for (int c = 0; c < 4; ++c) acc += u[r * 4 + c] * v[c];
      state_[idx[r]] = acc;
    }
  }
}

void StateVector::run(const Circuit& c) {
  for (const Gate& g : c.gates) apply(g);
}

Complex StateVector::amplitude(const std::string& bits) const {
  std::size_t idx = 0;
  for (int q = 0; q < n_; ++q)
    idx = (idx << 1) | (bits[q] == '1' ? 1u : 0u);
  return state_[idx];
}

std::vector<double> StateVector::probabilities() const {
  std::vector<double> p;
  p.reserve(state_.size());
  for (const Complex& a : state_) p.push_back(std::norm(a));
  return p;
}

Complex oracle_amplitude(const Circuit& c, const std::string& bits) {
  StateVector sv(c.n_qubits);
  sv.run(c);
  return sv.amplitude(bits);
}

std::vector<Complex> oracle_all_amplitudes(const Circuit& c) {
  StateVector sv(c.n_qubits);
  sv.run(c);
  return sv.state();
}

std::string bitstring_of_index(std::size_t index, int n_qubits) {
  std::string s(n_qubits, '0');
  for (int q = 0; q < n_qubits; ++q)
    if (index & (std::size_t{1} << (n_qubits - 1 - q))) s[q] = '1';
  return s;
}

}  // namespace mtc::test
