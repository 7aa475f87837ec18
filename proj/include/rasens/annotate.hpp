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

// Name resolution, validation and output-schema computation for query
// plans. Every node's output schema carries the constraint propagated to it
// from the base relations' domains and check constraints.

#ifndef RASENS_ANNOTATE_HPP_
#define RASENS_ANNOTATE_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rasens/constraint.hpp"
#include "rasens/error.hpp"
#include "rasens/query.hpp"
#include "rasens/solver.hpp"

namespace rasens {

using Catalog = std::map<std::string, ConstrainedSchema>;

inline Catalog MakeCatalog(const std::vector<ConstrainedSchema>& schemas) {
  Catalog out;
  for (const auto& s : schemas) {
    ValidateSchema(s);
    if (!out.emplace(s.name, s).second) {
      throw Error(ErrorKind::kValidation, "relation '" + s.name + "' declared twice");
    }
  }
  return out;
}

struct NodeInfo {
  Plan plan;
  int id = 0;
  std::vector<int> children;
  ConstrainedSchema schema;  // output attributes and propagated constraint
  // Base relation this node filters, when built only from Id, select,
  // union, intersect, minus and identity projections over that relation.
  std::optional<std::string> filter_of;
  // Statically guaranteed to produce exactly one row.
  bool single_row = false;
  // For productagg/group: bounds of each aggregated attribute under the
  // aggregated operand's constraint (used for empty-relation defaults).
  std::vector<Bounds> agg_bounds;
};

// Nodes in preorder; nodes[0] is the root.
struct AnnotatedPlan {
  std::vector<NodeInfo> nodes;

  const NodeInfo& root() const { return nodes.at(0); }
  const NodeInfo& node(int id) const { return nodes.at(static_cast<size_t>(id)); }
};

struct AnnotatedQuery {
  TopQuery query;
  AnnotatedPlan plan;
  Bounds top_bounds;  // bounds of the aggregated attribute under C_Q
};

// Value of an aggregate over the empty relation, given the bounds of the
// aggregated attribute: max(empty) = inf, min(empty) = sup, avg(empty) =
// midpoint. Infinite sides fall back to the finite one, then to 0.
inline Rational EmptyDefault(const AggFn& fn, const Bounds& b) {
  if (fn.kind == AggKind::kCount || fn.kind == AggKind::kSum || b.empty) return 0;
  const bool lo = b.lower.is_finite();
  const bool hi = b.upper.is_finite();
  switch (fn.kind) {
    case AggKind::kMax:
      return lo ? b.lower.value() : hi ? b.upper.value() : Rational(0);
    case AggKind::kMin:
      return hi ? b.upper.value() : lo ? b.lower.value() : Rational(0);
    case AggKind::kAvg:
      if (lo && hi) return (b.lower.value() + b.upper.value()) / 2;
      return lo ? b.lower.value() : hi ? b.upper.value() : Rational(0);
    default:
      return 0;
  }
}

namespace internal {

inline Domain Closure(const Domain& d) {
  if (d.kind() != Domain::Kind::kRealInterval) return d;
  return Domain::RealInterval(d.lower(), d.upper(), false, false);
}

inline bool IntegralValued(const Domain& d) {
  if (d.kind() == Domain::Kind::kIntInterval) return true;
  if (d.kind() != Domain::Kind::kNumberSet) return false;
  for (const auto& x : d.numbers()) {
    if (!IsInteger(x)) return false;
  }
  return true;
}

// Output attribute a_f and its constraint c_f for an aggregate over a
// relation whose aggregated attribute has bounds `b` and domain `source`.
inline std::pair<Attribute, Constraint> AggregateOutput(const AggFn& fn, const Domain* source,
                                                        const Bounds& b) {
  const std::string name = fn.OutputName();
  const Term a = Attr(name);
  if (fn.kind == AggKind::kCount) {
    return {Attribute{name, Domain::IntInterval(Rational(0), ExtRational::PosInf())},
            Ge(a, Num(0))};
  }
  if (b.empty) {
    return {Attribute{name, Domain::NumberSet({Rational(0)})}, Eq(a, Num(0))};
  }
  std::vector<Constraint> parts;
  auto closed_bounds = [&] {
    if (b.lower.is_finite()) parts.push_back(Ge(a, Num(b.lower.value())));
    if (b.upper.is_finite()) parts.push_back(Le(a, Num(b.upper.value())));
  };
  switch (fn.kind) {
    case AggKind::kSum: {
      if (b.lower.is_finite() && b.lower.value() >= 0) parts.push_back(Ge(a, Num(0)));
      if (b.upper.is_finite() && b.upper.value() <= 0) parts.push_back(Le(a, Num(0)));
      Domain d = IntegralValued(*source)
                     ? Domain::IntInterval(ExtRational::NegInf(), ExtRational::PosInf())
                     : Domain::RealInterval(ExtRational::NegInf(), ExtRational::PosInf());
      return {Attribute{name, d}, Constraint::And(parts)};
    }
    case AggKind::kMax:
    case AggKind::kMin:
      closed_bounds();
      return {Attribute{name, Closure(*source)}, Constraint::And(parts)};
    case AggKind::kAvg:
      closed_bounds();
      return {Attribute{name, Domain::RealInterval(b.lower, b.upper, false, false)},
              Constraint::And(parts)};
    default:
      break;
  }
  throw std::logic_error("AggregateOutput: unreachable");
}

class Annotator {
 public:
  Annotator(const Catalog& catalog, const SolverOptions& opts) : catalog_(catalog), opts_(opts) {}

  AnnotatedPlan Run(const Plan& plan) {
    Visit(plan);
    return std::move(out_);
  }

 private:
  [[noreturn]] static void Invalid(const std::string& msg) {
    throw Error(ErrorKind::kValidation, msg);
  }

  void CheckAggFn(const AggFn& fn, const ConstrainedSchema& s, const char* where) {
    if (fn.kind == AggKind::kCount) return;
    auto idx = s.IndexOf(fn.attribute);
    if (!idx) Invalid(std::string(where) + ": unknown attribute '" + fn.attribute + "'");
    if (!s.attributes[*idx].domain.is_numeric()) {
      throw Error(ErrorKind::kType, std::string(where) + ": " + fn.ToString() +
                                        " over string attribute '" + fn.attribute + "'");
    }
  }

  Bounds AggBounds(const AggFn& fn, const ConstrainedSchema& s) {
    if (fn.kind == AggKind::kCount) return Bounds{};
    return AttributeBounds(s.constraint, s, fn.attribute, opts_);
  }

  std::pair<Attribute, Constraint> AggOut(const AggFn& fn, const ConstrainedSchema& s,
                                          const Bounds& b) {
    const Domain* src = fn.kind == AggKind::kCount ? nullptr : &s.Find(fn.attribute)->domain;
    return AggregateOutput(fn, src, b);
  }

  static std::string Hide(const std::string& name, int id) {
    return name + "#" + std::to_string(id);
  }

  static void CheckUnionCompatible(const ConstrainedSchema& a, const ConstrainedSchema& b,
                                   const char* op) {
    if (a.AttributeNames() != b.AttributeNames()) {
      Invalid(std::string(op) + ": operands have different attributes");
    }
    for (size_t i = 0; i < a.attributes.size(); ++i) {
      if (a.attributes[i].domain.is_numeric() != b.attributes[i].domain.is_numeric()) {
        throw Error(ErrorKind::kType, std::string(op) + ": attribute '" +
                                          a.attributes[i].name + "' has different types");
      }
    }
  }

  static void CheckDisjoint(const ConstrainedSchema& a, const ConstrainedSchema& b,
                            const char* op) {
    for (const auto& x : a.attributes) {
      if (b.IndexOf(x.name)) {
        Invalid(std::string(op) + ": operands share attribute '" + x.name + "'");
      }
    }
  }

  static ConstrainedSchema Concat(const ConstrainedSchema& a, const ConstrainedSchema& b) {
    ConstrainedSchema s;
    s.attributes = a.attributes;
    s.attributes.insert(s.attributes.end(), b.attributes.begin(), b.attributes.end());
    s.hidden = a.hidden;
    s.hidden.insert(s.hidden.end(), b.hidden.begin(), b.hidden.end());
    s.constraint = Conjoin(a.constraint, b.constraint);
    return s;
  }

  int Visit(const Plan& p) {
    const int id = static_cast<int>(out_.nodes.size());
    out_.nodes.emplace_back();
    out_.nodes[id].plan = p;
    out_.nodes[id].id = id;
    std::vector<int> kids;
    for (const auto& c : p.children()) kids.push_back(Visit(c));
    NodeInfo info = std::move(out_.nodes[id]);
    info.children = kids;
    Compute(p, info);
    info.schema.name = std::string(OpKindName(p.op())) + "#" + std::to_string(id);
    if (p.op() == OpKind::kId) info.schema.name = p.relation();
    out_.nodes[id] = std::move(info);
    return id;
  }

  const NodeInfo& Child(const NodeInfo& info, size_t i) const {
    return out_.nodes[static_cast<size_t>(info.children[i])];
  }

  void Compute(const Plan& p, NodeInfo& info) {
    const int id = info.id;
    switch (p.op()) {
      case OpKind::kId: {
        auto it = catalog_.find(p.relation());
        if (it == catalog_.end()) Invalid("unknown relation '" + p.relation() + "'");
        info.schema = it->second;
        info.schema.hidden.clear();
        info.schema.constraint = Conjoin(DomainConstraint(it->second), it->second.constraint);
        info.filter_of = p.relation();
        return;
      }
      case OpKind::kLiteral: {
        ComputeLiteral(p, info);
        return;
      }
      case OpKind::kRestriction: {
        const ConstrainedSchema& c = Child(info, 0).schema;
        for (const auto& a : MentionedAttributes(p.predicate())) {
          if (!c.IndexOf(a)) Invalid("select: unknown attribute '" + a + "'");
        }
        TypeCheck(p.predicate(), c);
        info.schema = c;
        info.schema.constraint = Conjoin(c.constraint, p.predicate());
        info.filter_of = Child(info, 0).filter_of;
        return;
      }
      case OpKind::kProjection: {
        const NodeInfo& child = Child(info, 0);
        const ConstrainedSchema& c = child.schema;
        if (p.attrs().empty()) Invalid("project: empty attribute list");
        std::set<std::string> kept;
        for (const auto& a : p.attrs()) {
          if (!c.IndexOf(a)) Invalid("project: unknown attribute '" + a + "'");
          if (!kept.insert(a).second) Invalid("project: attribute '" + a + "' listed twice");
        }
        ConstrainedSchema s;
        for (const auto& a : p.attrs()) s.attributes.push_back(*c.Find(a));
        s.hidden = c.hidden;
        std::map<std::string, std::string> renames;
        for (const auto& a : c.attributes) {
          if (kept.count(a.name)) continue;
          renames[a.name] = Hide(a.name, id);
          s.hidden.push_back(Attribute{renames[a.name], a.domain});
        }
        s.constraint = Rename(c.constraint, renames);
        info.schema = std::move(s);
        if (p.attrs() == c.AttributeNames()) info.filter_of = child.filter_of;
        info.single_row = child.single_row;
        return;
      }
      case OpKind::kUnion:
      case OpKind::kIntersection:
      case OpKind::kDifference: {
        const NodeInfo& l = Child(info, 0);
        const NodeInfo& r = Child(info, 1);
        CheckUnionCompatible(l.schema, r.schema, OpKindName(p.op()));
        const bool same_base = l.filter_of && r.filter_of && *l.filter_of == *r.filter_of;
        if (same_base) info.filter_of = l.filter_of;
        ConstrainedSchema s;
        s.attributes = l.schema.attributes;
        if (p.op() != OpKind::kDifference) {
          for (size_t i = 0; i < s.attributes.size(); ++i) {
            s.attributes[i].domain =
                Domain::Join(l.schema.attributes[i].domain, r.schema.attributes[i].domain);
          }
        }
        s.hidden = l.schema.hidden;
        if (p.op() == OpKind::kUnion) {
          s.hidden.insert(s.hidden.end(), r.schema.hidden.begin(), r.schema.hidden.end());
          s.constraint = Disjoin(l.schema.constraint, r.schema.constraint);
        } else if (p.op() == OpKind::kIntersection) {
          s.hidden.insert(s.hidden.end(), r.schema.hidden.begin(), r.schema.hidden.end());
          s.constraint = Conjoin(l.schema.constraint, r.schema.constraint);
        } else if (same_base) {
          // Both sides select from the same base relation, so a row of the
          // left operand that is missing on the right violates C2.
          s.constraint = Conjoin(l.schema.constraint, Constraint::Not(r.schema.constraint));
        } else {
          s.constraint = l.schema.constraint;
        }
        info.schema = std::move(s);
        return;
      }
      case OpKind::kProduct:
      case OpKind::kProductN: {
        const NodeInfo& l = Child(info, 0);
        const NodeInfo& r = Child(info, 1);
        CheckDisjoint(l.schema, r.schema, OpKindName(p.op()));
        if (p.op() == OpKind::kProductN && p.n() < 1) Invalid("productN: n must be positive");
        info.schema = Concat(l.schema, r.schema);
        info.single_row = p.op() == OpKind::kProduct && l.single_row && r.single_row;
        return;
      }
      case OpKind::kProductOne: {
        const NodeInfo& l = Child(info, 0);
        const NodeInfo& r = Child(info, 1);
        CheckDisjoint(l.schema, r.schema, "product1");
        if (!r.single_row) {
          Invalid("product1: right operand must be a single row (a one-row literal, an "
                  "aggregate without grouping, or a projection of one)");
        }
        info.schema = Concat(l.schema, r.schema);
        info.single_row = l.single_row;
        return;
      }
      case OpKind::kProductAgg: {
        const NodeInfo& l = Child(info, 0);
        const NodeInfo& r = Child(info, 1);
        const AggFn& fn = p.fns()[0];
        CheckAggFn(fn, r.schema, "productagg");
        const Bounds b = AggBounds(fn, r.schema);
        auto [attr, cf] = AggOut(fn, r.schema, b);
        if (l.schema.IndexOf(attr.name)) {
          Invalid("productagg: left operand already has attribute '" + attr.name + "'");
        }
        ConstrainedSchema s = l.schema;
        s.attributes.push_back(attr);
        s.constraint = Conjoin(l.schema.constraint, cf);
        info.schema = std::move(s);
        info.agg_bounds = {b};
        info.single_row = l.single_row;
        return;
      }
      case OpKind::kGroupAggregate: {
        ComputeGroup(p, info);
        return;
      }
    }
  }

  void ComputeGroup(const Plan& p, NodeInfo& info) {
    const ConstrainedSchema& c = Child(info, 0).schema;
    if (p.fns().empty()) Invalid("group: no aggregation functions");
    std::set<std::string> names;
    for (const auto& g : p.attrs()) {
      if (!c.IndexOf(g)) Invalid("group: unknown attribute '" + g + "'");
      if (!names.insert(g).second) Invalid("group: attribute '" + g + "' listed twice");
    }
    ConstrainedSchema s;
    for (const auto& g : p.attrs()) s.attributes.push_back(*c.Find(g));
    std::vector<Constraint> parts;
    if (!p.attrs().empty()) {
      s.hidden = c.hidden;
      std::map<std::string, std::string> renames;
      for (const auto& a : c.attributes) {
        if (names.count(a.name)) continue;
        renames[a.name] = Hide(a.name, info.id);
        s.hidden.push_back(Attribute{renames[a.name], a.domain});
      }
      parts.push_back(Rename(c.constraint, renames));
    }
    for (const auto& fn : p.fns()) {
      CheckAggFn(fn, c, "group");
      const Bounds b = AggBounds(fn, c);
      auto [attr, cf] = AggOut(fn, c, b);
      if (!names.insert(attr.name).second) {
        Invalid("group: output attribute '" + attr.name + "' produced twice");
      }
      s.attributes.push_back(attr);
      parts.push_back(cf);
      info.agg_bounds.push_back(b);
    }
    s.constraint = Constraint::And(parts);
    info.schema = std::move(s);
    info.single_row = p.attrs().empty();
  }

  void ComputeLiteral(const Plan& p, NodeInfo& info) {
    const auto& attrs = p.attrs();
    std::set<std::string> names;
    for (const auto& a : attrs) {
      if (!names.insert(a).second) Invalid("literal: attribute '" + a + "' listed twice");
    }
    if (p.rows().empty()) Invalid("literal: no rows");
    std::set<Tuple> rows;
    for (const auto& r : p.rows()) {
      if (r.size() != attrs.size()) Invalid("literal: row arity mismatch");
      rows.insert(r);
    }
    ConstrainedSchema s;
    std::vector<Constraint> alternatives;
    for (size_t i = 0; i < attrs.size(); ++i) {
      std::set<Rational> nums;
      std::set<std::string> strs;
      for (const auto& r : rows) {
        if (IsNumber(r[i])) {
          nums.insert(AsNumber(r[i]));
        } else {
          strs.insert(AsString(r[i]));
        }
      }
      if (!nums.empty() && !strs.empty()) {
        throw Error(ErrorKind::kType, "literal: column '" + attrs[i] + "' mixes types");
      }
      s.attributes.push_back(Attribute{
          attrs[i], nums.empty()
                        ? Domain::StringSet(std::vector<std::string>(strs.begin(), strs.end()))
                        : Domain::NumberSet(std::vector<Rational>(nums.begin(), nums.end()))});
    }
    for (const auto& r : rows) {
      std::vector<Constraint> eqs;
      for (size_t i = 0; i < attrs.size(); ++i) {
        eqs.push_back(Eq(Attr(attrs[i]), IsNumber(r[i]) ? Num(AsNumber(r[i])) : Str(AsString(r[i]))));
      }
      alternatives.push_back(Constraint::And(eqs));
    }
    s.constraint = Constraint::Or(alternatives);
    info.schema = std::move(s);
    info.single_row = rows.size() == 1;
  }

  const Catalog& catalog_;
  SolverOptions opts_;
  AnnotatedPlan out_;
};

}  // namespace internal

inline AnnotatedPlan Annotate(const Plan& plan, const Catalog& catalog,
                              const SolverOptions& opts = {}) {
  return internal::Annotator(catalog, opts).Run(plan);
}

// Validates `q` against `catalog` and computes every node's output schema.
inline AnnotatedQuery Annotate(const TopQuery& q, const Catalog& catalog,
                               const SolverOptions& opts = {}) {
  AnnotatedQuery out{q, Annotate(q.body, catalog, opts), Bounds{}};
  const ConstrainedSchema& s = out.plan.root().schema;
  if (q.fn.kind != AggKind::kCount) {
    auto idx = s.IndexOf(q.fn.attribute);
    if (!idx) {
      throw Error(ErrorKind::kValidation, "top: unknown attribute '" + q.fn.attribute + "'");
    }
    if (!s.attributes[*idx].domain.is_numeric()) {
      throw Error(ErrorKind::kType, "top: " + q.fn.ToString() + " over string attribute '" +
                                        q.fn.attribute + "'");
    }
    out.top_bounds = AttributeBounds(s.constraint, s, q.fn.attribute, opts);
  }
  return out;
}

inline ConstrainedSchema OutputSchema(const Plan& plan, const Catalog& catalog,
                                      const SolverOptions& opts = {}) {
  return Annotate(plan, catalog, opts).root().schema;
}

}  // namespace rasens

#endif  // RASENS_ANNOTATE_HPP_
