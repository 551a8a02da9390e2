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

#ifndef MTC_XEB_HPP
#define MTC_XEB_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace mtc {

/// Linear cross-entropy benchmarking summary. sigma is exactly 1/sqrt(k).
struct XebReport {
  int n = 0;
  std::uint64_t k = 0;
  double f_xeb = 0.0;
  double sigma = 0.0;
  std::vector<double> per_instance;  // empty unless summarizing instances
  double mean = 0.0;
};

/// F = (2^n / k) * sum(p_i) - 1 over the sampled bitstrings' theoretical
/// probabilities. Compensated summation keeps millions of ~2^-n terms exact.
/// Throws DataError on an empty list or a negative probability.
double linear_xeb(int n, const std::vector<double>& probs);

/// Mean over per-instance fidelities with sigma = 1/sqrt(k), k = samples per
/// instance.
XebReport summarize(const std::vector<double>& per_instance, std::uint64_t k);

std::vector<double> probs_from_amplitudes(
    const std::vector<std::complex<double>>& amps);

/// Human-readable block and a TSV rendering of a report.
std::string format_report(const XebReport& r);
std::string format_report_tsv(const XebReport& r);

}  // namespace mtc

#endif  // MTC_XEB_HPP
