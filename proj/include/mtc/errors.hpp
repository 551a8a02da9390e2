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

#ifndef MTC_ERRORS_HPP
#define MTC_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mtc {

/// Malformed input text (circuit files, sample files, plan files).
/// `line` is 1-based; 0 means "no line information".
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what
                                : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Structurally invalid data (leg mismatches, bad indices, plan/diagram
/// disagreements).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an evaluation would exceed the configured resident-memory cap.
class MemoryCapError : public std::runtime_error {
 public:
  MemoryCapError(const std::string& what, int node)
      : std::runtime_error(what), node_(node) {}
  /// Contraction-tree node that triggered the overflow, -1 if unknown.
  int node() const { return node_; }

 private:
  int node_;
};

}  // namespace mtc

#endif  // MTC_ERRORS_HPP
