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

#include "mtc/circuit.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mtc/errors.hpp"

namespace mtc {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

struct GateSpec {
  GateKind kind;
  int arity;
  int params;
};

const std::map<std::string, GateSpec>& gate_table() {
  static const std::map<std::string, GateSpec> table = {
      {"h", {GateKind::kH, 1, 0}},       {"x", {GateKind::kX, 1, 0}},
      {"y", {GateKind::kY, 1, 0}},       {"z", {GateKind::kZ, 1, 0}},
      {"s", {GateKind::kS, 1, 0}},       {"t", {GateKind::kT, 1, 0}},
      {"rz", {GateKind::kRz, 1, 1}},     {"x_1_2", {GateKind::kX12, 1, 0}},
      {"y_1_2", {GateKind::kY12, 1, 0}}, {"hz_1_2", {GateKind::kHz12, 1, 0}},
      {"cz", {GateKind::kCz, 2, 0}},     {"cx", {GateKind::kCx, 2, 0}},
      {"fs", {GateKind::kFsim, 2, 2}},
  };
  return table;
}

}  // namespace

const char* gate_name(GateKind kind) {
  for (const auto& [name, spec] : gate_table())
    if (spec.kind == kind) return name.c_str();
  return "?";
}

int gate_arity(GateKind kind) {
  for (const auto& [name, spec] : gate_table())
    if (spec.kind == kind) return spec.arity;
  return 1;
}

int gate_param_count(GateKind kind) {
  for (const auto& [name, spec] : gate_table())
    if (spec.kind == kind) return spec.params;
  return 0;
}

std::vector<Complex> gate_matrix(const Gate& gate) {
  const Complex i{0.0, 1.0};
  switch (gate.kind) {
    case GateKind::kH:
      return {kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2};
    case GateKind::kX:
      return {0, 1, 1, 0};
    case GateKind::kY:
      return {0, -i, i, 0};
    case GateKind::kZ:
      return {1, 0, 0, -1};
    case GateKind::kS:
      return {1, 0, 0, i};
    case GateKind::kT:
      return {1, 0, 0, std::polar(1.0, M_PI / 4)};
    case GateKind::kRz:
      return {std::polar(1.0, -gate.p0 / 2), 0, 0, std::polar(1.0, gate.p0 / 2)};
    case GateKind::kX12:
      // x^(1/2) including the global phase e^{i pi/4}, the circuit-file
      // convention for the _1_2 gate family.
      return {Complex{0.5, 0.5}, Complex{0.5, -0.5},  //
              Complex{0.5, -0.5}, Complex{0.5, 0.5}};
    case GateKind::kY12:
      return {Complex{0.5, 0.5}, Complex{-0.5, -0.5},  //
              Complex{0.5, 0.5}, Complex{0.5, 0.5}};
    case GateKind::kHz12:
      return {Complex{0.5, 0.5}, Complex{0.0, -kInvSqrt2},  //
              Complex{kInvSqrt2, 0.0}, Complex{0.5, 0.5}};
    case GateKind::kCz:
      return {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1};
    case GateKind::kCx:
      return {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0};
    case GateKind::kFsim: {
      double c = std::cos(gate.p0), s = std::sin(gate.p0);
      return {1, 0,      0,      0,                           //
              0, c,      -i * s, 0,                           //
              0, -i * s, c,      0,                           //
              0, 0,      0,      std::polar(1.0, -gate.p1)};
    }
  }
  throw DataError("unknown gate kind");
}

Circuit parse_circuit(std::istream& in) {
  Circuit c;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  int last_moment = 0;
  std::set<std::pair<int, int>> busy;  // (moment, qubit)

  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream ss(line);
    if (!have_header) {
      std::string tok;
      if (!(ss >> tok)) continue;  // blank or comment-only line
      std::size_t used = 0;
      try {
        c.n_qubits = std::stoi(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || c.n_qubits < 1)
        throw ParseError("expected positive qubit count, got '" + tok + "'",
                         lineno);
      std::string extra;
      if (ss >> extra)
        throw ParseError("unexpected token after qubit count", lineno);
      have_header = true;
      continue;
    }

    Gate g;
    std::string name;
    if (!(ss >> g.moment >> name)) {
      std::istringstream probe(line);
      std::string tok;
      if (!(probe >> tok)) continue;  // blank line
      throw ParseError("malformed gate line", lineno);
    }
    auto it = gate_table().find(name);
    if (it == gate_table().end())
      throw ParseError("unknown gate '" + name + "'", lineno);
    const GateSpec& spec = it->second;
    g.kind = spec.kind;

    if (!(ss >> g.q0)) throw ParseError("missing qubit index", lineno);
    if (spec.arity == 2 && !(ss >> g.q1))
      throw ParseError("gate '" + name + "' needs two qubits", lineno);
    for (int p = 0; p < spec.params; ++p) {
      double v;
      if (!(ss >> v))
        throw ParseError("gate '" + name + "' needs " +
                             std::to_string(spec.params) + " parameter(s)",
                         lineno);
      (p == 0 ? g.p0 : g.p1) = v;
    }
    std::string extra;
    if (ss >> extra)
      throw ParseError("unexpected token '" + extra + "'", lineno);

    if (g.moment < last_moment)
      throw ParseError("moments must be non-decreasing", lineno);
    last_moment = g.moment;

    for (int q : {g.q0, g.q1}) {
      if (q < 0 && spec.arity == 1) break;
      if (q < 0 || q >= c.n_qubits)
        throw ParseError("qubit index " + std::to_string(q) +
                             " out of range for " + std::to_string(c.n_qubits) +
                             " qubits",
                         lineno);
      if (!busy.insert({g.moment, q}).second)
        throw ParseError("qubit " + std::to_string(q) +
                             " used twice in moment " +
                             std::to_string(g.moment),
                         lineno);
    }
    if (spec.arity == 2 && g.q0 == g.q1)
      throw ParseError("two-qubit gate on identical qubits", lineno);
    if (spec.arity == 1) g.q1 = -1;
    c.gates.push_back(g);
  }
  if (!have_header) throw ParseError("empty circuit file", lineno);
  return c;
}

Circuit parse_circuit(const std::string& text) {
  std::istringstream ss(text);
  return parse_circuit(ss);
}

Circuit parse_circuit_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open circuit file: " + path);
  return parse_circuit(in);
}

std::string format_circuit(const Circuit& c) {
  std::ostringstream out;
  out << c.n_qubits << "\n";
  for (const Gate& g : c.gates) {
    out << g.moment << " " << gate_name(g.kind) << " " << g.q0;
    if (g.arity() == 2) out << " " << g.q1;
    int np = gate_param_count(g.kind);
    out.precision(17);
    if (np >= 1) out << " " << g.p0;
    if (np >= 2) out << " " << g.p1;
    out << "\n";
  }
  return out.str();
}

}  // namespace mtc
