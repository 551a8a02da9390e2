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

#include "mtc/tensor.hpp"

#include <algorithm>
#include <cstddef>

#include "mtc/errors.hpp"

namespace mtc {

namespace {

std::uint64_t shape_size(const std::vector<Leg>& legs) {
  std::uint64_t n = 1;
  for (const Leg& l : legs) n *= l.dim;
  return n;
}

void check_legs(const std::vector<Leg>& legs) {
  for (std::size_t i = 0; i < legs.size(); ++i) {
    if (legs[i].dim < 1) throw DataError("malformed tensor: zero-dim leg");
    for (std::size_t j = i + 1; j < legs.size(); ++j)
      if (legs[i].id == legs[j].id)
        throw DataError("malformed tensor: duplicate leg " +
                        std::to_string(legs[i].id));
  }
}

std::uint64_t stride_of_leg(const std::vector<Leg>& legs, LegId id) {
  std::uint64_t acc = 1;
  for (std::size_t i = legs.size(); i-- > 0;) {
    if (legs[i].id == id) return acc;
    acc *= legs[i].dim;
  }
  return 0;  // absent
}

const Leg* find_leg(const std::vector<Leg>& legs, LegId id) {
  for (const Leg& l : legs)
    if (l.id == id) return &l;
  return nullptr;
}

}  // namespace

Tensor::Tensor(std::vector<Leg> legs) : legs_(std::move(legs)) {
  check_legs(legs_);
  data_.assign(shape_size(legs_), Complex{});
}

Tensor::Tensor(std::vector<Leg> legs, std::vector<Complex> data)
    : legs_(std::move(legs)), data_(std::move(data)) {
  check_legs(legs_);
  if (data_.size() != shape_size(legs_))
    throw DataError("malformed tensor: data length does not match shape");
}

Tensor Tensor::scalar(Complex v) {
  Tensor t;
  t.data_[0] = v;
  return t;
}

bool Tensor::has_leg(LegId id) const { return find_leg(legs_, id) != nullptr; }

std::uint32_t Tensor::dim_of(LegId id) const {
  const Leg* l = find_leg(legs_, id);
  if (!l) throw DataError("unknown leg " + std::to_string(id));
  return l->dim;
}

Complex Tensor::at(std::span<const std::uint32_t> idx) const {
  return const_cast<Tensor*>(this)->at(idx);
}

Complex& Tensor::at(std::span<const std::uint32_t> idx) {
  if (idx.size() != legs_.size()) throw DataError("index order mismatch");
  std::uint64_t off = 0, stride = 1;
  for (std::size_t i = legs_.size(); i-- > 0;) {
    if (idx[i] >= legs_[i].dim) throw DataError("index out of range");
    off += idx[i] * stride;
    stride *= legs_[i].dim;
  }
  return data_[off];
}

std::vector<Leg> contraction_result_legs(const std::vector<Leg>& a,
                                         const std::vector<Leg>& b,
                                         std::span<const LegId> closed) {
  check_legs(a);
  check_legs(b);
  std::vector<LegId> cl(closed.begin(), closed.end());
  std::sort(cl.begin(), cl.end());
  cl.erase(std::unique(cl.begin(), cl.end()), cl.end());

  for (LegId id : cl) {
    const Leg* la = find_leg(a, id);
    const Leg* lb = find_leg(b, id);
    if (!la || !lb)
      throw DataError("closed leg " + std::to_string(id) +
                      " not present in both operands");
  }
  for (const Leg& la : a) {
    if (const Leg* lb = find_leg(b, la.id); lb && lb->dim != la.dim)
      throw DataError("leg dim conflict on leg " + std::to_string(la.id));
  }

  std::vector<Leg> result;
  for (const Leg& l : a)
    if (!std::binary_search(cl.begin(), cl.end(), l.id)) result.push_back(l);
  for (const Leg& l : b)
    if (!std::binary_search(cl.begin(), cl.end(), l.id) && !find_leg(a, l.id))
      result.push_back(l);
  std::sort(result.begin(), result.end(),
            [](const Leg& x, const Leg& y) { return x.id < y.id; });
  return result;
}

PairCost predicted_cost(const std::vector<Leg>& a, const std::vector<Leg>& b,
                        std::span<const LegId> closed) {
  std::vector<Leg> result = contraction_result_legs(a, b, closed);
  std::vector<LegId> cl(closed.begin(), closed.end());
  std::sort(cl.begin(), cl.end());
  cl.erase(std::unique(cl.begin(), cl.end()), cl.end());

  std::uint64_t d_closed = 1;
  for (LegId id : cl) d_closed *= find_leg(a, id)->dim;
  std::uint64_t d_open = shape_size(result);

  PairCost c;
  c.mults = d_closed * d_open;
  c.adds = (d_closed - 1) * d_open;
  c.rw = shape_size(a) + shape_size(b) + d_open;
  return c;
}

Tensor contract_pair(const Tensor& a, const Tensor& b,
                     std::span<const LegId> closed, OpCounters* counters) {
  std::vector<Leg> result_legs =
      contraction_result_legs(a.legs(), b.legs(), closed);
  std::vector<LegId> cl(closed.begin(), closed.end());
  std::sort(cl.begin(), cl.end());
  cl.erase(std::unique(cl.begin(), cl.end()), cl.end());

  // Per-result-leg and per-closed-leg strides into each operand (0 if the
  // leg is absent there). Closed legs iterate in ascending-id row-major
  // order; that fixes the floating-point reduction order.
  const std::size_t nr = result_legs.size();
  const std::size_t nc = cl.size();
  std::vector<std::uint64_t> rdim(nr), rsa(nr), rsb(nr);
  for (std::size_t i = 0; i < nr; ++i) {
    rdim[i] = result_legs[i].dim;
    rsa[i] = stride_of_leg(a.legs(), result_legs[i].id);
    rsb[i] = stride_of_leg(b.legs(), result_legs[i].id);
  }
  std::vector<std::uint64_t> cdim(nc), csa(nc), csb(nc);
  std::uint64_t d_closed = 1;
  for (std::size_t i = 0; i < nc; ++i) {
    cdim[i] = a.dim_of(cl[i]);
    csa[i] = stride_of_leg(a.legs(), cl[i]);
    csb[i] = stride_of_leg(b.legs(), cl[i]);
    d_closed *= cdim[i];
  }

  std::uint64_t d_open = shape_size(result_legs);
  std::vector<Complex> out(d_open);

  const Complex* pa = a.data().data();
  const Complex* pb = b.data().data();

  // The last (fastest) closed leg runs in a tight inner loop; the remaining
  // closed legs walk an odometer. Summation stays in ascending-id row-major
  // order: the first product seeds the accumulator and every further term
  // adds once, so each output element costs d_closed multiplications and
  // d_closed-1 additions.
  std::uint64_t in_n = 1, in_sa = 0, in_sb = 0;
  std::size_t no = nc;  // outer closed legs
  if (nc > 0) {
    in_n = cdim[nc - 1];
    in_sa = csa[nc - 1];
    in_sb = csb[nc - 1];
    no = nc - 1;
  }
  std::uint64_t outer_n = d_closed / in_n;

  std::vector<std::uint32_t> ridx(nr, 0), cidx(no, 0);
  std::uint64_t offa = 0, offb = 0;
  for (std::uint64_t i = 0; i < d_open; ++i) {
    std::uint64_t ca = offa, cb = offb;
    std::fill(cidx.begin(), cidx.end(), 0);
    const Complex* qa = pa + ca;
    const Complex* qb = pb + cb;
    double accr = qa[0].real() * qb[0].real() - qa[0].imag() * qb[0].imag();
    double acci = qa[0].real() * qb[0].imag() + qa[0].imag() * qb[0].real();
    for (std::uint64_t t = 1; t < in_n; ++t) {
      double xr = qa[t * in_sa].real(), xi = qa[t * in_sa].imag();
      double yr = qb[t * in_sb].real(), yi = qb[t * in_sb].imag();
      accr += xr * yr - xi * yi;
      acci += xr * yi + xi * yr;
    }
    for (std::uint64_t o = 1; o < outer_n; ++o) {
      for (std::size_t j = no; j-- > 0;) {
        if (++cidx[j] < cdim[j]) {
          ca += csa[j];
          cb += csb[j];
          break;
        }
        cidx[j] = 0;
        ca -= csa[j] * (cdim[j] - 1);
        cb -= csb[j] * (cdim[j] - 1);
      }
      qa = pa + ca;
      qb = pb + cb;
      for (std::uint64_t t = 0; t < in_n; ++t) {
        double xr = qa[t * in_sa].real(), xi = qa[t * in_sa].imag();
        double yr = qb[t * in_sb].real(), yi = qb[t * in_sb].imag();
        accr += xr * yr - xi * yi;
        acci += xr * yi + xi * yr;
      }
    }
    out[i] = Complex{accr, acci};
    for (std::size_t j = nr; j-- > 0;) {
      if (++ridx[j] < rdim[j]) {
        offa += rsa[j];
        offb += rsb[j];
        break;
      }
      ridx[j] = 0;
      offa -= rsa[j] * (rdim[j] - 1);
      offb -= rsb[j] * (rdim[j] - 1);
    }
  }

  if (counters) {
    counters->mults += d_closed * d_open;
    counters->adds += (d_closed - 1) * d_open;
    counters->rw += a.size() + b.size() + d_open;
  }
  return Tensor(std::move(result_legs), std::move(out));
}

Tensor project_leg(const Tensor& t, LegId leg, std::uint32_t value) {
  const std::vector<Leg>& legs = t.legs();
  std::size_t pos = legs.size();
  for (std::size_t i = 0; i < legs.size(); ++i)
    if (legs[i].id == leg) pos = i;
  if (pos == legs.size())
    throw DataError("unknown leg " + std::to_string(leg));
  if (value >= legs[pos].dim)
    throw DataError("projection value " + std::to_string(value) +
                    " out of range for leg " + std::to_string(leg));

  std::uint64_t inner = 1;
  for (std::size_t i = pos + 1; i < legs.size(); ++i) inner *= legs[i].dim;
  std::uint64_t dim = legs[pos].dim;
  std::uint64_t outer = t.size() / (inner * dim);

  std::vector<Leg> out_legs;
  out_legs.reserve(legs.size() - 1);
  for (std::size_t i = 0; i < legs.size(); ++i)
    if (i != pos) out_legs.push_back(legs[i]);

  std::vector<Complex> out(outer * inner);
  const Complex* src = t.data().data();
  for (std::uint64_t o = 0; o < outer; ++o)
    std::copy_n(src + (o * dim + value) * inner, inner,
                out.begin() + o * inner);
  return Tensor(std::move(out_legs), std::move(out));
}

}  // namespace mtc
