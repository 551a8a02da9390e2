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

#include "mtc/xeb.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "mtc/errors.hpp"

namespace mtc {

namespace {

// Neumaier compensated sum.
double compensated_sum(const std::vector<double>& xs) {
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

}  // namespace

double linear_xeb(int n, const std::vector<double>& probs) {
  if (probs.empty()) throw DataError("linear_xeb needs at least one sample");
  if (n < 0 || n > 1022) throw DataError("qubit count out of range");
  for (double p : probs)
    if (p < 0.0) throw DataError("negative probability");
  double sum = compensated_sum(probs);
  return std::ldexp(sum / static_cast<double>(probs.size()), n) - 1.0;
}

XebReport summarize(const std::vector<double>& per_instance,
                    std::uint64_t k) {
  if (per_instance.empty())
    throw DataError("summarize needs at least one instance value");
  if (k < 1) throw DataError("samples per instance must be at least 1");
  XebReport r;
  r.k = k;
  r.sigma = 1.0 / std::sqrt(static_cast<double>(k));
  r.per_instance = per_instance;
  r.mean = compensated_sum(per_instance) /
           static_cast<double>(per_instance.size());
  r.f_xeb = r.mean;
  return r;
}

std::vector<double> probs_from_amplitudes(
    const std::vector<std::complex<double>>& amps) {
  std::vector<double> probs;
  probs.reserve(amps.size());
  for (const auto& a : amps) probs.push_back(std::norm(a));
  return probs;
}

std::string format_report(const XebReport& r) {
  char buf[128];
  std::ostringstream out;
  out << "linear XEB report\n";
  if (r.n > 0) out << "  qubits        " << r.n << "\n";
  out << "  samples (k)   " << r.k << "\n";
  if (!r.per_instance.empty()) {
    out << "  instances     " << r.per_instance.size() << "\n";
    for (std::size_t i = 0; i < r.per_instance.size(); ++i) {
      std::snprintf(buf, sizeof buf, "  instance %-4zu %.6g  (%.2f%%)", i,
                    r.per_instance[i], 100.0 * r.per_instance[i]);
      out << buf << "\n";
    }
    std::snprintf(buf, sizeof buf, "  mean F_XEB    %.6g  (%.2f%%)", r.mean,
                  100.0 * r.mean);
    out << buf << "\n";
  } else {
    std::snprintf(buf, sizeof buf, "  F_XEB         %.6g  (%.2f%%)", r.f_xeb,
                  100.0 * r.f_xeb);
    out << buf << "\n";
  }
  std::snprintf(buf, sizeof buf, "  sigma         %.6g", r.sigma);
  out << buf << "\n";
  std::snprintf(buf, sizeof buf, "  5*sigma       %.6g", 5.0 * r.sigma);
  out << buf << "\n";
  return out.str();
}

std::string format_report_tsv(const XebReport& r) {
  char buf[128];
  std::ostringstream out;
  auto kv = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s\t%.17g\n", key, v);
    out << buf;
  };
  out << "n\t" << r.n << "\n";
  out << "k\t" << r.k << "\n";
  kv("f_xeb", r.f_xeb);
  kv("sigma", r.sigma);
  if (!r.per_instance.empty()) {
    kv("mean", r.mean);
    for (std::size_t i = 0; i < r.per_instance.size(); ++i) {
      std::snprintf(buf, sizeof buf, "instance_%zu\t%.17g\n", i,
                    r.per_instance[i]);
      out << buf;
    }
  }
  return out.str();
}

}  // namespace mtc
