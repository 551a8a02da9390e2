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

#ifndef MTC_TENSOR_HPP
#define MTC_TENSOR_HPP

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace mtc {

using LegId = std::uint32_t;
using Complex = std::complex<double>;

/// A tensor index. Legs with the same id on two tensors are the same bond.
struct Leg {
  LegId id;
  std::uint32_t dim;

  friend bool operator==(const Leg&, const Leg&) = default;
};

/// Running totals of complex multiplications, complex additions, and tensor
/// elements read or written. One instance per evaluation session; contraction
/// increments are exact (they equal the loop trip counts of the kernel).
struct OpCounters {
  std::uint64_t mults = 0;
  std::uint64_t adds = 0;
  std::uint64_t rw = 0;

  OpCounters& operator+=(const OpCounters& o) {
    mults += o.mults;
    adds += o.adds;
    rw += o.rw;
    return *this;
  }
  friend bool operator==(const OpCounters&, const OpCounters&) = default;
};

/// Dense complex tensor with labeled legs. Data is row-major over the legs in
/// listed order. Immutable in spirit: operations return new tensors.
class Tensor {
 public:
  /// Order-0 tensor holding a single zero.
  Tensor() : data_(1) {}

  /// Zero-filled tensor of the given shape. Leg ids must be distinct.
  explicit Tensor(std::vector<Leg> legs);

  /// Tensor with explicit contents; data.size() must equal the shape size.
  Tensor(std::vector<Leg> legs, std::vector<Complex> data);

  static Tensor scalar(Complex v);

  const std::vector<Leg>& legs() const { return legs_; }
  std::size_t order() const { return legs_.size(); }

  /// Number of elements (product of bond dimensions).
  std::uint64_t size() const { return data_.size(); }

  const std::vector<Complex>& data() const { return data_; }
  std::vector<Complex>& data() { return data_; }

  bool has_leg(LegId id) const;
  std::uint32_t dim_of(LegId id) const;

  /// Element access by multi-index in listed-leg order.
  Complex at(std::span<const std::uint32_t> idx) const;
  Complex& at(std::span<const std::uint32_t> idx);

 private:
  std::vector<Leg> legs_;
  std::vector<Complex> data_;
};

/// Cost of one pairwise contraction, from shapes alone.
struct PairCost {
  std::uint64_t mults = 0;
  std::uint64_t adds = 0;
  std::uint64_t rw = 0;
};

/// Legs of contract_pair's result: (legs(a) ∪ legs(b)) \ closed, ascending by
/// id. Shared legs absent from `closed` stay open and appear once. Throws
/// DataError on a bond-dimension conflict or a duplicate leg inside one
/// operand.
std::vector<Leg> contraction_result_legs(const std::vector<Leg>& a,
                                         const std::vector<Leg>& b,
                                         std::span<const LegId> closed);

/// Predicted exact cost of contract_pair on these shapes:
///   mults = Π dims(closed) · Π dims(result)
///   adds  = (Π dims(closed) − 1) · Π dims(result)
///   rw    = size(a) + size(b) + size(result)
PairCost predicted_cost(const std::vector<Leg>& a, const std::vector<Leg>& b,
                        std::span<const LegId> closed);

/// Pairwise contraction: sums over `closed` legs (which must appear in both
/// operands with equal dims); shared legs not in `closed` are matched
/// elementwise and stay open. Result legs are ascending by id, which makes
/// contract_pair(a,b,c) == contract_pair(b,a,c) bit-exact. The summation
/// order over closed indices is fixed (row-major over ascending closed ids),
/// so repeated evaluations are bit-reproducible.
Tensor contract_pair(const Tensor& a, const Tensor& b,
                     std::span<const LegId> closed,
                     OpCounters* counters = nullptr);

/// Fixes `leg` to `value` and drops it; the remaining legs keep their order.
Tensor project_leg(const Tensor& t, LegId leg, std::uint32_t value);

}  // namespace mtc

#endif  // MTC_TENSOR_HPP
