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

#include "mtc/formats.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mtc/errors.hpp"

namespace mtc {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string canonical(std::string s, BitOrder order) {
  if (order == BitOrder::kQubit0Last) std::reverse(s.begin(), s.end());
  return s;
}

}  // namespace

std::vector<std::string> read_samples(std::istream& in, BitOrder order) {
  std::vector<std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    for (char c : line)
      if (c != '0' && c != '1' && c != '*')
        throw ParseError("invalid bitstring character '" + std::string(1, c) +
                             "'",
                         lineno);
    if (!out.empty() && line.size() != out.front().size())
      throw ParseError("bitstring length differs from previous lines", lineno);
    out.push_back(canonical(std::move(line), order));
  }
  if (!out.empty()) {
    const std::string& first = out.front();
    for (std::size_t i = 1; i < out.size(); ++i)
      for (std::size_t q = 0; q < first.size(); ++q)
        if ((out[i][q] == '*') != (first[q] == '*'))
          throw ParseError("'*' positions differ between sample lines", 0);
  }
  return out;
}

std::vector<std::string> read_samples_file(const std::string& path,
                                           BitOrder order) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open samples file: " + path);
  return read_samples(in, order);
}

std::string format_amplitude_row(const std::string& bitstring,
                                 std::complex<double> amp, BitOrder order) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "\t%.16e\t%.16e\n", amp.real(), amp.imag());
  return canonical(bitstring, order) + buf;
}

std::vector<AmplitudeRow> read_amplitude_tsv(std::istream& in,
                                             BitOrder order) {
  std::vector<AmplitudeRow> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    AmplitudeRow row;
    double re, im;
    if (!(ss >> row.bitstring >> re >> im))
      throw ParseError("malformed amplitude row", lineno);
    row.amp = {re, im};
    row.bitstring = canonical(row.bitstring, order);
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<double> read_probabilities(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string first;
    ss >> first;
    double v;
    std::string rest;
    if (ss >> v) {
      // Three columns: amplitude TSV row.
      double im;
      if (!(ss >> im)) throw ParseError("malformed probability row", lineno);
      out.push_back(v * v + im * im);
    } else {
      std::size_t used = 0;
      try {
        v = std::stod(first, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != first.size())
        throw ParseError("malformed probability '" + first + "'", lineno);
      out.push_back(v);
    }
  }
  return out;
}

std::vector<double> read_probabilities_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open probability file: " + path);
  return read_probabilities(in);
}

}  // namespace mtc
