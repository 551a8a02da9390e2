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

#ifndef MTC_CIRCUIT_HPP
#define MTC_CIRCUIT_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "mtc/tensor.hpp"

namespace mtc {

enum class GateKind {
  kH,
  kX,
  kY,
  kZ,
  kS,
  kT,
  kRz,    // rz(theta)
  kX12,   // x^(1/2)
  kY12,   // y^(1/2)
  kHz12,  // w^(1/2), w = (x+y)/sqrt(2)
  kCz,
  kCx,  // control = first qubit
  kFsim,  // fs(theta, phi)
};

struct Gate {
  int moment = 0;
  GateKind kind = GateKind::kH;
  int q0 = 0;
  int q1 = -1;  // -1 for single-qubit gates
  double p0 = 0.0;
  double p1 = 0.0;

  int arity() const { return q1 < 0 ? 1 : 2; }
};

struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;
};

const char* gate_name(GateKind kind);
int gate_arity(GateKind kind);
int gate_param_count(GateKind kind);

/// Unitary of the gate, row-major. 2x2 for single-qubit gates; 4x4 for
/// two-qubit gates in the |q0 q1> basis (first listed qubit is the high bit).
std::vector<Complex> gate_matrix(const Gate& gate);

/// Text format: first non-comment line is the qubit count, then one gate per
/// line as "<moment> <name> <q0> [<q1>] [<param>...]" with radian parameters;
/// '#' starts a comment. Throws ParseError with the offending line number.
Circuit parse_circuit(std::istream& in);
Circuit parse_circuit(const std::string& text);
Circuit parse_circuit_file(const std::string& path);

std::string format_circuit(const Circuit& c);

}  // namespace mtc

#endif  // MTC_CIRCUIT_HPP
