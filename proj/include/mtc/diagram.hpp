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

#ifndef MTC_DIAGRAM_HPP
#define MTC_DIAGRAM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mtc/circuit.hpp"
#include "mtc/tensor.hpp"

namespace mtc {

/// Tensor-network skeleton of a circuit. Slot j holds the (fused) gate or
/// initial-state tensor that variable j ranges over. Legs are numbered with
/// all closed legs first, then one open leg per qubit: the open leg of qubit
/// q has id n_closed + q. Every closed leg connects exactly two slots and
/// every open leg exactly one (graph network; hyperedges are rejected).
struct NetworkDiagram {
  int n_qubits = 0;
  std::uint32_t n_closed = 0;
  std::vector<std::uint32_t> leg_dims;            // indexed by leg id
  std::vector<Tensor> slot_tensors;               // one per slot, unprojected
  std::vector<std::vector<LegId>> slot_open_legs; // per slot, ascending
  std::vector<LegId> open_legs;                   // per qubit

  std::size_t slot_count() const { return slot_tensors.size(); }
  std::size_t leg_count() const { return leg_dims.size(); }
  bool is_open(LegId id) const { return id >= n_closed; }
  /// Qubit of an open leg.
  int qubit_of(LegId id) const { return static_cast<int>(id - n_closed); }
};

/// Converts a circuit to a diagram. Slot order: one |0> slot per qubit, then
/// the gates in circuit order. With fuse=true, runs of single-qubit gates are
/// absorbed into the neighbouring two-qubit gate on the same wire (the
/// following one if any, otherwise the preceding one); a run with no
/// two-qubit neighbour is emitted as one merged slot.
NetworkDiagram to_diagram(const Circuit& c, bool fuse);

/// Checks the graph-network invariants; throws DataError on violation.
void validate_diagram(const NetworkDiagram& d);

/// Per-variable value sets and index tuples for a batch of requests.
/// value_sets[j][v] are the concrete tensors slot j takes; tuples[i][j]
/// indexes into value_sets[j] for request i. Requests are kept in input
/// order, duplicates included.
struct AssignmentSet {
  std::vector<std::vector<Tensor>> value_sets;
  std::vector<std::vector<std::uint32_t>> tuples;
  std::vector<std::string> request_keys;  // canonical bitstrings ('*' = batch)
  std::vector<LegId> batch_legs;          // ascending

  std::size_t request_count() const { return tuples.size(); }
};

/// Builds value sets from bitstrings over {0,1,*}. Character position q is
/// qubit q. Positions covered by batch_legs must be '*' and stay open; the
/// others are projected onto the requested bit. For a slot with fixed output
/// legs, the value set lists the projections that actually occur, ordered by
/// the fixed-bit tuple ascending.
AssignmentSet build_assignments(const NetworkDiagram& d,
                                const std::vector<std::string>& bitstrings,
                                const std::vector<LegId>& batch_legs);

}  // namespace mtc

#endif  // MTC_DIAGRAM_HPP
