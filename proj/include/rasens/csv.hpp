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

// RFC 4180 CSV reading and writing, and loading of relations with domain
// and check-constraint validation.

#ifndef RASENS_CSV_HPP_
#define RASENS_CSV_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "rasens/constraint.hpp"
#include "rasens/engine.hpp"
#include "rasens/error.hpp"

namespace rasens {

struct CsvRecord {
  int line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

inline std::vector<CsvRecord> ParseCsv(std::string_view text) {
  std::vector<CsvRecord> out;
  size_t i = 0;
  int line = 1;
  while (i < text.size()) {
    CsvRecord rec;
    rec.line = line;
    std::string field;
    bool done = false;
    while (!done) {
      if (i < text.size() && text[i] == '"') {
        ++i;
        while (true) {
          if (i >= text.size()) throw SyntaxError("unterminated quoted field", rec.line, 1);
          if (text[i] == '"') {
            if (i + 1 < text.size() && text[i + 1] == '"') {
              field += '"';
              i += 2;
              continue;
            }
            ++i;
            break;
          }
          if (text[i] == '\n') ++line;
          field += text[i++];
        }
      } else {
        while (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
          field += text[i++];
        }
      }
      if (i < text.size() && text[i] == ',') {
        rec.fields.push_back(std::move(field));
        field.clear();
        ++i;
        continue;
      }
      rec.fields.push_back(std::move(field));
      if (i < text.size() && text[i] == '\r') ++i;
      if (i < text.size() && text[i] == '\n') {
        ++i;
      } else if (i < text.size()) {
        throw SyntaxError("unexpected character after quoted field", line, 1);
      }
      ++line;
      done = true;
    }
    if (rec.fields.size() == 1 && rec.fields[0].empty()) continue;  // blank line
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string ToCsv(const Relation& r) {
  std::string out;
  for (size_t i = 0; i < r.attributes.size(); ++i) {
    out += (i ? "," : "") + CsvField(r.attributes[i]);
  }
  out += "\n";
  for (const auto& t : r.tuples) {
    for (size_t i = 0; i < t.size(); ++i) {
      out += (i ? "," : "") +
             CsvField(IsNumber(t[i]) ? ToDecimalString(AsNumber(t[i])) : AsString(t[i]));
    }
    out += "\n";
  }
  return out;
}

// Reads a relation of `schema`. The header must list the schema's
// attributes in order; every row must lie in the attribute domains and
// satisfy the check constraint. All offending rows are reported together.
inline Relation LoadRelation(std::string_view text, const ConstrainedSchema& schema) {
  const auto records = ParseCsv(text);
  const std::vector<std::string> names = schema.AttributeNames();
  if (records.empty()) {
    throw DataError({"missing header row for relation '" + schema.name + "'"});
  }
  if (records[0].fields != names) {
    std::string expected;
    for (size_t i = 0; i < names.size(); ++i) expected += (i ? "," : "") + names[i];
    throw DataError({"line " + std::to_string(records[0].line) + ": header must be '" +
                     expected + "'"});
  }
  const ConstraintEvaluator check(schema.constraint, names);
  std::vector<std::string> errors;
  Relation r;
  r.attributes = names;
  for (size_t k = 1; k < records.size(); ++k) {
    const CsvRecord& rec = records[k];
    const std::string where = "line " + std::to_string(rec.line) + ": ";
    if (rec.fields.size() != names.size()) {
      errors.push_back(where + "expected " + std::to_string(names.size()) + " fields, found " +
                       std::to_string(rec.fields.size()));
      continue;
    }
    Tuple t;
    bool ok = true;
    for (size_t i = 0; i < names.size() && ok; ++i) {
      const Domain& d = schema.attributes[i].domain;
      const std::string& f = rec.fields[i];
      Value v = f;
      if (d.is_numeric()) {
        auto x = ParseRational(f);
        if (!x) {
          errors.push_back(where + "attribute '" + names[i] + "': '" + f + "' is not a number");
          ok = false;
          break;
        }
        v = *x;
      }
      if (!d.Contains(v)) {
        errors.push_back(where + "attribute '" + names[i] + "': " + ToString(v) +
                         " outside domain " + d.ToString());
        ok = false;
      }
      t.push_back(std::move(v));
    }
    if (!ok) continue;
    if (!check(t)) {
      errors.push_back(where + "row violates check constraint " + ToString(schema.constraint));
      continue;
    }
    r.tuples.push_back(std::move(t));
  }
  if (!errors.empty()) throw DataError(std::move(errors));
  r.Normalize();
  return r;
}

}  // namespace rasens

#endif  // RASENS_CSV_HPP_
