//
// Copyright 2026 The rasens Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef RASENS_ERROR_HPP_
#define RASENS_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <vector>

namespace rasens {

enum class ErrorKind {
  kSyntax,      // malformed schema/query/data text
  kValidation,  // unknown names, non-disjoint products, bad operands
  kType,        // arithmetic on strings, avg over a string attribute, ...
  kData,        // rows rejected on load
  kRuntime,     // cardinality check of a single-row operand
  kUnbounded,   // noise requested for an infinite sensitivity
  kInfeasible,  // oracle universe too large or infinite
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, int line, int column)
      : Error(ErrorKind::kSyntax, std::to_string(line) + ":" +
                                      std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Load-time rejection; carries one message per offending row.
class DataError : public Error {
 public:
  explicit DataError(std::vector<std::string> rows)
      : Error(ErrorKind::kData, Join(rows)), rows_(std::move(rows)) {}
  const std::vector<std::string>& rows() const { return rows_; }

 private:
  static std::string Join(const std::vector<std::string>& rows) {
    std::string out = std::to_string(rows.size()) + " row(s) rejected";
    for (const auto& r : rows) out += "\n  " + r;
    return out;
  }
  std::vector<std::string> rows_;
};

}  // namespace rasens

#endif  // RASENS_ERROR_HPP_
