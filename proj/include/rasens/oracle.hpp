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

// Brute-force sensitivity over every database drawn from a small finite
// tuple universe. Nothing here consults the analyzer: query values come
// from the engine alone, so the results can serve as ground truth.
//
// A database assigns each relation a subset of its universe. Two databases
// are adjacent when every relation differs by at most one tuple and at
// least one relation differs; with a single relation this is the usual
// add-one-tuple adjacency.

#ifndef RASENS_ORACLE_HPP_
#define RASENS_ORACLE_HPP_

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "rasens/analyzer.hpp"
#include "rasens/annotate.hpp"
#include "rasens/engine.hpp"
#include "rasens/error.hpp"
#include "rasens/query.hpp"
#include "rasens/rational.hpp"
#include "rasens/sensitivity_value.hpp"
#include "rasens/solver.hpp"

namespace rasens {

inline constexpr size_t kDefaultOracleCap = 12;

// Per relation, the universe T = sol(C_I) of admissible tuples.
struct UniverseSpec {
  std::vector<ConstrainedSchema> schemas;
  std::vector<std::vector<Tuple>> tuples;  // sorted, duplicate-free

  size_t size() const {
    size_t n = 0;
    for (const auto& t : tuples) n += t.size();
    return n;
  }
  uint64_t database_count() const { return uint64_t{1} << size(); }

  // Bit offset of relation k inside a database mask.
  size_t offset(size_t k) const {
    size_t o = 0;
    for (size_t i = 0; i < k; ++i) o += tuples[i].size();
    return o;
  }

  Database MakeDatabase(uint64_t mask) const {
    Database db;
    size_t bit = 0;
    for (size_t k = 0; k < schemas.size(); ++k) {
      Relation r;
      r.attributes = schemas[k].AttributeNames();
      for (const auto& t : tuples[k]) {
        if (mask >> bit & 1) r.tuples.push_back(t);
        ++bit;
      }
      db.emplace(schemas[k].name, std::move(r));
    }
    return db;
  }
};

inline std::set<std::string> ReferencedRelations(const Plan& p) {
  std::set<std::string> out;
  if (p.op() == OpKind::kId) out.insert(p.relation());
  for (const auto& c : p.children()) {
    auto sub = ReferencedRelations(c);
    out.insert(sub.begin(), sub.end());
  }
  return out;
}

// Enumerates sol(C_I) of each named relation. Throws kInfeasible when a
// universe is infinite or the total exceeds `cap` tuples.
inline UniverseSpec MakeUniverse(const std::set<std::string>& relations, const Catalog& catalog,
                                 size_t cap = kDefaultOracleCap, const SolverOptions& opts = {}) {
  if (cap > 20) throw Error(ErrorKind::kInfeasible, "oracle cap above 20 tuples is not supported");
  UniverseSpec u;
  size_t total = 0;
  for (const auto& name : relations) {
    auto it = catalog.find(name);
    if (it == catalog.end()) {
      throw Error(ErrorKind::kValidation, "unknown relation '" + name + "'");
    }
    const ConstrainedSchema& s = it->second;
    const Constraint ci = Conjoin(DomainConstraint(s), s.constraint);
    SolutionSet sol = EnumerateSolutions(ci, s, cap + 1, opts);
    if (sol.kind == SolutionCount::Kind::kInfinite) {
      throw Error(ErrorKind::kInfeasible,
                  "universe of relation '" + name + "' is infinite; the oracle needs a finite one");
    }
    if (sol.kind == SolutionCount::Kind::kExceedsCap || total + sol.tuples.size() > cap) {
      const std::string n = sol.kind == SolutionCount::Kind::kExceedsCap
                                ? "more than " + std::to_string(cap)
                                : std::to_string(total + sol.tuples.size());
      throw Error(ErrorKind::kInfeasible, "universe has " + n + " tuples; oracle cap is " +
                                              std::to_string(cap));
    }
    total += sol.tuples.size();
    u.schemas.push_back(s);
    u.tuples.push_back(std::move(sol.tuples));
  }
  return u;
}

inline UniverseSpec MakeUniverse(const Plan& plan, const Catalog& catalog,
                                 size_t cap = kDefaultOracleCap, const SolverOptions& opts = {}) {
  return MakeUniverse(ReferencedRelations(plan), catalog, cap, opts);
}

namespace internal {

// Relation-wise masks, used to compute d_nH between two databases.
inline std::vector<uint64_t> RelationMasks(const UniverseSpec& u) {
  std::vector<uint64_t> out;
  size_t o = 0;
  for (const auto& t : u.tuples) {
    const uint64_t width = t.size();
    out.push_back(width == 0 ? 0 : (((uint64_t{1} << width) - 1) << o));
    o += width;
  }
  return out;
}

inline int NormHamming(uint64_t diff, const std::vector<uint64_t>& masks) {
  int d = 0;
  for (uint64_t m : masks) d = std::max(d, std::popcount(diff & m));
  return d;
}

// Calls fn(a, b) once for every unordered adjacent pair. In `b` the first
// relation that differs has one more tuple than in `a`.
template <typename F>
void ForEachAdjacentPair(const UniverseSpec& u, F&& fn) {
  const size_t k = u.schemas.size();
  std::vector<size_t> width(k), offset(k);
  for (size_t i = 0; i < k; ++i) {
    width[i] = u.tuples[i].size();
    offset[i] = u.offset(i);
  }
  const uint64_t count = u.database_count();
  for (uint64_t a = 0; a < count; ++a) {
    // choice[i] in [0, width[i]]: width[i] means "relation i unchanged".
    std::vector<size_t> choice(k, 0);
    for (size_t i = 0; i < k; ++i) choice[i] = width[i];
    while (true) {
      // Advance to the next combination (odometer).
      size_t i = 0;
      while (i < k) {
        if (choice[i] == width[i]) {
          choice[i] = 0;
        } else {
          ++choice[i];
        }
        if (choice[i] != width[i]) break;
        ++i;
      }
      if (i == k) break;
      uint64_t b = a;
      bool first = true;
      bool keep = true;
      for (size_t j = 0; j < k; ++j) {
        if (choice[j] == width[j]) continue;
        const uint64_t bit = uint64_t{1} << (offset[j] + choice[j]);
        if (first) {
          keep = (a & bit) == 0;
          first = false;
        }
        b ^= bit;
      }
      if (keep) fn(a, b);
    }
  }
}

inline Rational AbsDiff(const Rational& x, const Rational& y) {
  return x < y ? Rational(y - x) : Rational(x - y);
}

}  // namespace internal

struct SensitivityWitness {
  Database r;
  Database r_plus;
  Rational value_r;
  Rational value_r_plus;
};

struct OracleResult {
  Rational value;             // max |gamma_f(Q(R+)) - gamma_f(Q(R))|
  SensitivityWitness witness;
  uint64_t databases = 0;
  uint64_t adjacent_pairs = 0;
};

// gamma_f(Q(D)) for every database mask D.
inline std::vector<Rational> QueryValues(const AnnotatedQuery& q, const UniverseSpec& u) {
  std::vector<Rational> out;
  out.reserve(u.database_count());
  for (uint64_t m = 0; m < u.database_count(); ++m) out.push_back(Evaluate(q, u.MakeDatabase(m)));
  return out;
}

// Adjacency form: the largest change of the query value across an adjacent
// pair. The first pair reaching the maximum (in mask order) is the witness.
inline OracleResult BruteSensitivity(const AnnotatedQuery& q, const UniverseSpec& u,
                                     const std::vector<Rational>& values) {
  OracleResult res;
  res.databases = u.database_count();
  uint64_t best_a = 0, best_b = 0;
  bool found = false;
  internal::ForEachAdjacentPair(u, [&](uint64_t a, uint64_t b) {
    ++res.adjacent_pairs;
    Rational d = internal::AbsDiff(values[a], values[b]);
    if (!found || d > res.value) {
      res.value = std::move(d);
      best_a = a;
      best_b = b;
      found = true;
    }
  });
  if (found) {
    res.witness = {u.MakeDatabase(best_a), u.MakeDatabase(best_b), values[best_a],
                   values[best_b]};
  } else {
    res.witness = {u.MakeDatabase(0), u.MakeDatabase(0), values[0], values[0]};
  }
  (void)q;
  return res;
}

inline OracleResult BruteSensitivity(const AnnotatedQuery& q, const UniverseSpec& u) {
  return BruteSensitivity(q, u, QueryValues(q, u));
}

// Ratio form: max over all D != D' of |gamma_f(Q(D)) - gamma_f(Q(D'))| /
// d_nH(D, D'). A floating-point pass discards pairs that cannot beat
// `lower` (normally the adjacency-form value); survivors are compared
// exactly.
inline Rational BruteSensitivityRatio(const UniverseSpec& u, const std::vector<Rational>& values,
                                      const Rational& lower = 0) {
  const auto masks = internal::RelationMasks(u);
  const uint64_t count = u.database_count();
  std::vector<double> approx(values.size());
  for (size_t i = 0; i < values.size(); ++i) approx[i] = ToDouble(values[i]);
  Rational best = lower;
  double best_d = ToDouble(best);
  for (uint64_t a = 0; a < count; ++a) {
    for (uint64_t b = a + 1; b < count; ++b) {
      const int d = internal::NormHamming(a ^ b, masks);
      const double r = std::fabs(approx[a] - approx[b]) / d;
      if (r < best_d * (1 - 1e-9) - 1e-12) continue;
      Rational exact = internal::AbsDiff(values[a], values[b]) / d;
      if (exact > best) {
        best = std::move(exact);
        best_d = ToDouble(best);
      }
    }
  }
  return best;
}

// For every node of `plan`, max over D != D' of
// d_H(node(D), node(D')) / d_nH(D, D'), exact. Entry k belongs to node k.
inline std::vector<Rational> BruteLipschitz(const AnnotatedPlan& plan, const UniverseSpec& u) {
  const uint64_t count = u.database_count();
  const size_t n = plan.nodes.size();
  // outputs[node][mask] as sorted ids of interned tuples.
  std::vector<std::vector<std::vector<uint32_t>>> outputs(n);
  std::vector<std::map<Tuple, uint32_t>> intern(n);
  for (uint64_t m = 0; m < count; ++m) {
    std::vector<Relation> trace;
    Evaluate(plan, u.MakeDatabase(m), &trace);
    for (size_t k = 0; k < n; ++k) {
      std::vector<uint32_t> ids;
      for (const auto& t : trace[k].tuples) {
        auto [it, _] = intern[k].emplace(t, static_cast<uint32_t>(intern[k].size()));
        ids.push_back(it->second);
      }
      std::sort(ids.begin(), ids.end());
      outputs[k].push_back(std::move(ids));
    }
  }
  const auto masks = internal::RelationMasks(u);
  std::vector<Rational> out;
  for (size_t k = 0; k < n; ++k) {
    uint64_t num = 0, den = 1;
    for (uint64_t a = 0; a < count; ++a) {
      for (uint64_t b = a + 1; b < count; ++b) {
        const auto& x = outputs[k][a];
        const auto& y = outputs[k][b];
        size_t common = 0;
        for (size_t i = 0, j = 0; i < x.size() && j < y.size();) {
          if (x[i] < y[j]) {
            ++i;
          } else if (y[j] < x[i]) {
            ++j;
          } else {
            ++common, ++i, ++j;
          }
        }
        const uint64_t dh = x.size() + y.size() - 2 * common;
        const uint64_t d = static_cast<uint64_t>(internal::NormHamming(a ^ b, masks));
        if (dh * den > num * d) {
          num = dh;
          den = d;
        }
      }
    }
    out.push_back(Rational(Integer(num), Integer(den)));
  }
  return out;
}

enum class Verdict { kSound, kStrict, kViolation };

inline const char* VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kSound: return "SOUND";
    case Verdict::kStrict: return "STRICT";
    case Verdict::kViolation: return "VIOLATION";
  }
  return "?";
}

inline Verdict Judge(const SensitivityValue& gs, const Rational& oracle) {
  if (gs.is_infinite()) return Verdict::kSound;
  if (oracle > gs.value()) return Verdict::kViolation;
  return oracle == gs.value() ? Verdict::kStrict : Verdict::kSound;
}

struct ValidationResult {
  SensitivityValue gs;
  OracleResult oracle;
  Rational ratio_form;  // all-pairs form; equals oracle.value
  Verdict verdict = Verdict::kSound;
  size_t universe_size = 0;
};

inline ValidationResult Validate(const AnnotatedQuery& q, const SensitivityReport& report,
                                 const Catalog& catalog, size_t cap = kDefaultOracleCap,
                                 const SolverOptions& opts = {}) {
  const UniverseSpec u = MakeUniverse(q.query.body, catalog, cap, opts);
  const auto values = QueryValues(q, u);
  ValidationResult v;
  v.gs = report.gs;
  v.universe_size = u.size();
  v.oracle = BruteSensitivity(q, u, values);
  v.ratio_form = BruteSensitivityRatio(u, values, v.oracle.value);
  v.verdict = Judge(report.gs, v.oracle.value);
  return v;
}

// ---- Serialization ---------------------------------------------------------

// Integers become JSON numbers; other rationals are rendered as strings.
inline nlohmann::json ValueJson(const Value& v) {
  if (!IsNumber(v)) return AsString(v);
  const Rational& x = AsNumber(v);
  if (IsInteger(x) && x >= std::numeric_limits<int64_t>::min() &&
      x <= std::numeric_limits<int64_t>::max()) {
    return static_cast<int64_t>(boost::multiprecision::numerator(x));
  }
  return ToDecimalString(x);
}

inline nlohmann::json DatabaseJson(const Database& db) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, r] : db) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& t : r.tuples) {
      nlohmann::json row = nlohmann::json::array();
      for (const auto& v : t) row.push_back(ValueJson(v));
      rows.push_back(std::move(row));
    }
    j[name] = std::move(rows);
  }
  return j;
}

inline nlohmann::json ToJson(const ValidationResult& v) {
  nlohmann::json j;
  PutSensitivity(j, "gs", v.gs);
  j["oracle"] = RationalJson(v.oracle.value);
  j["oracle_float"] = ToDouble(v.oracle.value);
  j["oracle_ratio_form"] = RationalJson(v.ratio_form);
  j["witness"] = {{"R", DatabaseJson(v.oracle.witness.r)},
                  {"R_plus", DatabaseJson(v.oracle.witness.r_plus)},
                  {"value_R", RationalJson(v.oracle.witness.value_r)},
                  {"value_R_plus", RationalJson(v.oracle.witness.value_r_plus)}};
  j["verdict"] = VerdictName(v.verdict);
  j["universe_size"] = v.universe_size;
  j["databases"] = v.oracle.databases;
  j["adjacent_pairs"] = v.oracle.adjacent_pairs;
  return j;
}

}  // namespace rasens

#endif  // RASENS_ORACLE_HPP_
