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

// Compositional sensitivity analysis.
//
//   S(Id)            = min(1, diam(C_Id))
//   S(op(Q))         = min(delta_op * S(Q), diam(C_op(Q)))
//   S(op(Q1, Q2))    = min(delta_op * max(S(Q1), S(Q2)), diam(C_op(Q1,Q2)))
//   GS(gamma_f(Q))   = delta_f(C_Q) * S(Q)   for count, sum, avg
//                    = delta_f(C_Q)          for max, min

#ifndef RASENS_ANALYZER_HPP_
#define RASENS_ANALYZER_HPP_

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rasens/annotate.hpp"
#include "rasens/constraint.hpp"
#include "rasens/query.hpp"
#include "rasens/sensitivity_value.hpp"
#include "rasens/solver.hpp"

namespace rasens {

struct AnalyzerOptions {
  SolverOptions solver;
  // Test hook: replaces the intrinsic delta of an operator.
  std::map<OpKind, SensitivityValue> delta_override;
};

// Intrinsic sensitivity of an operator. Literal relations do not depend on
// the database.
inline SensitivityValue OperatorDelta(OpKind op, uint64_t n = 1) {
  switch (op) {
    case OpKind::kId: return 1;
    case OpKind::kLiteral: return 0;
    case OpKind::kUnion:
    case OpKind::kIntersection:
    case OpKind::kDifference: return 2;
    case OpKind::kRestriction:
    case OpKind::kProjection: return 1;
    case OpKind::kProduct: return SensitivityValue::Infinity();
    case OpKind::kProductOne: return 1;
    case OpKind::kProductN: return SensitivityValue(Rational(Integer(n)));
    case OpKind::kProductAgg: return 1;
    case OpKind::kGroupAggregate: return 2;
  }
  return SensitivityValue::Infinity();
}

// delta_f(C) from the bounds of the aggregated attribute; +inf when a needed
// endpoint is infinite. Open endpoints are read as their closure.
inline SensitivityValue FunctionDelta(AggKind kind, const Bounds& b) {
  if (kind == AggKind::kCount) return 1;
  if (b.empty) return 0;
  if (!b.lower.is_finite() || !b.upper.is_finite()) return SensitivityValue::Infinity();
  const Rational& lo = b.lower.value();
  const Rational& hi = b.upper.value();
  switch (kind) {
    case AggKind::kSum: return SensitivityValue(Rational(std::max(abs(lo), abs(hi))));
    case AggKind::kMax:
    case AggKind::kMin: return SensitivityValue(Rational(hi - lo));
    case AggKind::kAvg: return SensitivityValue(Rational((hi - lo) / 2));
    default: return 1;
  }
}

struct NodeReport {
  int id = 0;
  OpKind op = OpKind::kId;
  std::string label;  // operator with its parameters, e.g. "productN 3"
  std::vector<int> children;
  SensitivityValue delta_op;
  SensitivityValue diam;
  SensitivityValue s;
  Constraint constraint = Constraint::True();
  bool depends_on_data = true;
};

struct TopReport {
  AggFn fn;
  Bounds bounds;
  SensitivityValue delta;
};

struct SensitivityReport {
  std::string query;
  std::vector<NodeReport> nodes;  // preorder, nodes[0] is the root
  TopReport top;
  SensitivityValue s;             // S(Q) at the root
  SensitivityValue gs;
  Satisfiability satisfiable = Satisfiability::kUnknown;
  std::vector<std::string> warnings;
};

namespace internal {

inline std::string NodeLabel(const Plan& p) {
  std::string label = OpKindName(p.op());
  switch (p.op()) {
    case OpKind::kId: return label + " " + p.relation();
    case OpKind::kProductN: return label + " " + std::to_string(p.n());
    case OpKind::kProductAgg: return label + " " + p.fns()[0].ToString();
    case OpKind::kProjection: return label + " " + JoinNames(p.attrs());
    case OpKind::kRestriction: return label + " " + ToString(p.predicate());
    case OpKind::kGroupAggregate: {
      std::string fns;
      for (size_t i = 0; i < p.fns().size(); ++i) fns += (i ? ", " : "") + p.fns()[i].ToString();
      return label + " " + (p.attrs().empty() ? "" : JoinNames(p.attrs()) + " ") + "agg " + fns;
    }
    default: return label;
  }
}

}  // namespace internal

inline SensitivityReport Analyze(const AnnotatedQuery& q, const AnalyzerOptions& opts = {}) {
  SensitivityReport rep;
  rep.query = ToString(q.query);
  const auto& nodes = q.plan.nodes;
  rep.nodes.resize(nodes.size());
  // Children have larger preorder ids, so a reverse sweep is bottom-up.
  for (size_t k = nodes.size(); k-- > 0;) {
    const NodeInfo& info = nodes[k];
    NodeReport& r = rep.nodes[k];
    r.id = info.id;
    r.op = info.plan.op();
    r.label = internal::NodeLabel(info.plan);
    r.children = info.children;
    r.constraint = info.schema.constraint;
    auto ov = opts.delta_override.find(r.op);
    r.delta_op = ov != opts.delta_override.end() ? ov->second
                                                 : OperatorDelta(r.op, info.plan.n());
    r.diam = Diameter(info.schema.constraint, info.schema, opts.solver.enum_cap, opts.solver);
    r.depends_on_data = r.op == OpKind::kId;
    SensitivityValue inner = 0;
    for (int c : info.children) {
      inner = Max(inner, rep.nodes[static_cast<size_t>(c)].s);
      r.depends_on_data = r.depends_on_data || rep.nodes[static_cast<size_t>(c)].depends_on_data;
    }
    if (r.op == OpKind::kId) inner = 1;
    r.s = r.op == OpKind::kLiteral ? SensitivityValue(0) : Min(r.delta_op * inner, r.diam);

    const bool restricted_product = r.op == OpKind::kProductOne || r.op == OpKind::kProductN ||
                                    r.op == OpKind::kProductAgg;
    if (restricted_product && rep.nodes[static_cast<size_t>(info.children[1])].depends_on_data) {
      rep.warnings.push_back(
          "node " + std::to_string(r.id) + " (" + r.label +
          "): the right operand depends on the database; the operator's intrinsic "
          "sensitivity assumes it does not, so the bound may be unsound for this query");
    }
  }
  rep.s = rep.nodes[0].s;

  const ConstrainedSchema& root = q.plan.root().schema;
  rep.satisfiable = Satisfiable(root.constraint, root, opts.solver);
  rep.top.fn = q.query.fn;
  rep.top.bounds = q.top_bounds;
  rep.top.delta = FunctionDelta(q.query.fn.kind, q.top_bounds);

  if (rep.satisfiable == Satisfiability::kNo) {
    rep.gs = 0;
    rep.warnings.push_back("query is statically empty: its propagated constraint is unsatisfiable");
    return rep;
  }
  if (rep.top.delta.is_infinite()) {
    rep.warnings.push_back("attribute '" + q.query.fn.attribute +
                           "' is unbounded under the propagated constraint " +
                           q.top_bounds.ToString() + "; sensitivity of " +
                           q.query.fn.ToString() + " is infinite");
  }
  const bool extremum = q.query.fn.kind == AggKind::kMax || q.query.fn.kind == AggKind::kMin;
  if (extremum) {
    rep.gs = rep.top.delta;
    if (rep.s.is_zero() && !rep.gs.is_zero()) {
      rep.warnings.push_back("S(Q) = 0: the aggregated relation is statically constant, but " +
                             q.query.fn.ToString() + " ignores S(Q) and reports GS = " +
                             rep.gs.ToString());
    }
  } else {
    rep.gs = rep.top.delta * rep.s;
  }
  if (rep.s.is_infinite() && !extremum) {
    rep.warnings.push_back("intermediate sensitivity S(Q) is unbounded");
  }
  return rep;
}

inline SensitivityReport Analyze(const TopQuery& q, const Catalog& catalog,
                                 const AnalyzerOptions& opts = {}) {
  return Analyze(Annotate(q, catalog, opts.solver), opts);
}

// ---- Serialization ---------------------------------------------------------

inline nlohmann::json RationalJson(const Rational& r) { return ToString(r); }

inline nlohmann::json ExtJson(const ExtRational& x) { return x.ToString(); }

inline nlohmann::json FloatJson(double d) {
  if (std::isinf(d) || std::isnan(d)) return nullptr;
  return d;
}

inline void PutSensitivity(nlohmann::json& j, const std::string& key, const SensitivityValue& v) {
  j[key] = v.ToString();
  j[key + "_float"] = FloatJson(v.ToDouble());
}

inline nlohmann::json BoundsJson(const Bounds& b) {
  nlohmann::json j;
  if (b.empty) {
    j["empty"] = true;
    return j;
  }
  j["lo"] = ExtJson(b.lower);
  j["hi"] = ExtJson(b.upper);
  j["lo_float"] = FloatJson(b.lower.ToDouble());
  j["hi_float"] = FloatJson(b.upper.ToDouble());
  j["lo_open"] = b.lower_open;
  j["hi_open"] = b.upper_open;
  return j;
}

inline const char* SatisfiabilityName(Satisfiability s) {
  switch (s) {
    case Satisfiability::kYes: return "yes";
    case Satisfiability::kNo: return "no";
    default: return "unknown";
  }
}

inline nlohmann::json ToJson(const SensitivityReport& rep) {
  nlohmann::json j;
  j["query"] = rep.query;
  PutSensitivity(j, "gs", rep.gs);
  PutSensitivity(j, "s", rep.s);
  j["satisfiable"] = SatisfiabilityName(rep.satisfiable);
  nlohmann::json top;
  top["fn"] = AggKindName(rep.top.fn.kind);
  top["attr"] = rep.top.fn.kind == AggKind::kCount ? nlohmann::json(nullptr)
                                                   : nlohmann::json(rep.top.fn.attribute);
  top["bounds"] = rep.top.fn.kind == AggKind::kCount ? nlohmann::json(nullptr)
                                                     : BoundsJson(rep.top.bounds);
  PutSensitivity(top, "delta", rep.top.delta);
  j["top"] = top;
  j["nodes"] = nlohmann::json::array();
  for (const auto& n : rep.nodes) {
    nlohmann::json x;
    x["id"] = n.id;
    x["op"] = OpKindName(n.op);
    x["label"] = n.label;
    x["children"] = n.children;
    PutSensitivity(x, "s", n.s);
    PutSensitivity(x, "delta_op", n.delta_op);
    PutSensitivity(x, "diam", n.diam);
    x["constraint_text"] = ToString(n.constraint);
    j["nodes"].push_back(x);
  }
  j["warnings"] = rep.warnings;
  return j;
}

inline std::string ToTable(const SensitivityReport& rep) {
  std::ostringstream os;
  os << "query: " << rep.query << "\n";
  os << "id  op          delta   diam    S       constraint\n";
  for (const auto& n : rep.nodes) {
    auto pad = [](std::string s, size_t w) {
      if (s.size() < w) s.append(w - s.size(), ' ');
      return s + " ";
    };
    os << pad(std::to_string(n.id), 3) << pad(OpKindName(n.op), 11)
       << pad(n.delta_op.ToString(), 7) << pad(n.diam.ToString(), 7) << pad(n.s.ToString(), 7)
       << ToString(n.constraint) << "\n";
  }
  os << "top: " << rep.top.fn.ToString();
  if (rep.top.fn.kind != AggKind::kCount) os << " bounds " << rep.top.bounds.ToString();
  os << " delta_f " << rep.top.delta.ToString() << "\n";
  os << "S(Q) = " << rep.s.ToString() << "\n";
  os << "GS = " << rep.gs.ToString() << "\n";
  for (const auto& w : rep.warnings) os << "warning: " << w << "\n";
  return os.str();
}

}  // namespace rasens

#endif  // RASENS_ANALYZER_HPP_
