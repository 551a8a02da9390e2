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

#ifndef MTC_FORMATS_HPP
#define MTC_FORMATS_HPP

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace mtc {

/// Mapping between bitstring characters and qubits. kQubit0First is the
/// default: the leftmost character is qubit 0. kQubit0Last reverses each
/// line on input and output.
enum class BitOrder { kQubit0First, kQubit0Last };

/// Sample file: one string over {0,1,*} per line, '#' comments allowed.
/// Returned strings are canonical (qubit 0 first). Lines must share one
/// length and one '*' pattern.
std::vector<std::string> read_samples(std::istream& in, BitOrder order);
std::vector<std::string> read_samples_file(const std::string& path,
                                           BitOrder order);

/// One amplitude row: "bitstring<TAB>re<TAB>im" with 17 significant digits.
std::string format_amplitude_row(const std::string& bitstring,
                                 std::complex<double> amp, BitOrder order);

struct AmplitudeRow {
  std::string bitstring;  // canonical (qubit 0 first)
  std::complex<double> amp;
};
std::vector<AmplitudeRow> read_amplitude_tsv(std::istream& in, BitOrder order);

/// Probability file: one decimal per line. Also accepts the amplitude TSV
/// (three columns), converting |amp|^2 per row.
std::vector<double> read_probabilities(std::istream& in);
std::vector<double> read_probabilities_file(const std::string& path);

}  // namespace mtc

#endif  // MTC_FORMATS_HPP
