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

// Relational algebra query trees with a mandatory top-level aggregation.

#ifndef RASENS_QUERY_HPP_
#define RASENS_QUERY_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rasens/constraint.hpp"
#include "rasens/error.hpp"

namespace rasens {

enum class AggKind { kCount, kSum, kMax, kMin, kAvg };

inline const char* AggKindName(AggKind k) {
  switch (k) {
    case AggKind::kCount: return "count";
    case AggKind::kSum: return "sum";
    case AggKind::kMax: return "max";
    case AggKind::kMin: return "min";
    case AggKind::kAvg: return "avg";
  }
  return "?";
}

inline std::optional<AggKind> ParseAggKind(std::string_view s) {
  if (s == "count") return AggKind::kCount;
  if (s == "sum") return AggKind::kSum;
  if (s == "max") return AggKind::kMax;
  if (s == "min") return AggKind::kMin;
  if (s == "avg") return AggKind::kAvg;
  return std::nullopt;
}

// An aggregation function; `attribute` is empty for count.
struct AggFn {
  AggKind kind = AggKind::kCount;
  std::string attribute;

  static AggFn Count() { return {AggKind::kCount, ""}; }
  static AggFn Sum(std::string a) { return {AggKind::kSum, std::move(a)}; }
  static AggFn Max(std::string a) { return {AggKind::kMax, std::move(a)}; }
  static AggFn Min(std::string a) { return {AggKind::kMin, std::move(a)}; }
  static AggFn Avg(std::string a) { return {AggKind::kAvg, std::move(a)}; }

  // Name of the attribute this function contributes to an aggregate output.
  std::string OutputName() const {
    if (kind == AggKind::kCount) return "count";
    return std::string(AggKindName(kind)) + "_" + attribute;
  }

  std::string ToString() const {
    if (kind == AggKind::kCount) return "count";
    return std::string(AggKindName(kind)) + "(" + attribute + ")";
  }

  friend bool operator==(const AggFn&, const AggFn&) = default;
};

enum class OpKind {
  kId,
  kLiteral,
  kUnion,
  kIntersection,
  kDifference,
  kRestriction,
  kProjection,
  kProduct,
  kProductOne,
  kProductN,
  kProductAgg,
  kGroupAggregate,
};

inline const char* OpKindName(OpKind op) {
  switch (op) {
    case OpKind::kId: return "id";
    case OpKind::kLiteral: return "literal";
    case OpKind::kUnion: return "union";
    case OpKind::kIntersection: return "intersect";
    case OpKind::kDifference: return "minus";
    case OpKind::kRestriction: return "select";
    case OpKind::kProjection: return "project";
    case OpKind::kProduct: return "product";
    case OpKind::kProductOne: return "product1";
    case OpKind::kProductN: return "productN";
    case OpKind::kProductAgg: return "productagg";
    case OpKind::kGroupAggregate: return "group";
  }
  return "?";
}

inline std::optional<OpKind> ParseOpKind(std::string_view s) {
  for (OpKind op : {OpKind::kId, OpKind::kLiteral, OpKind::kUnion, OpKind::kIntersection,
                    OpKind::kDifference, OpKind::kRestriction, OpKind::kProjection,
                    OpKind::kProduct, OpKind::kProductOne, OpKind::kProductN,
                    OpKind::kProductAgg, OpKind::kGroupAggregate}) {
    if (s == OpKindName(op)) return op;
  }
  return std::nullopt;
}

inline bool IsBinary(OpKind op) {
  switch (op) {
    case OpKind::kUnion:
    case OpKind::kIntersection:
    case OpKind::kDifference:
    case OpKind::kProduct:
    case OpKind::kProductOne:
    case OpKind::kProductN:
    case OpKind::kProductAgg:
      return true;
    default:
      return false;
  }
}

// Immutable operator tree. Copies share structure.
class Plan {
 public:
  struct Node {
    OpKind op = OpKind::kId;
    std::string relation;            // kId
    std::vector<std::string> attrs;  // projection / group / literal columns
    std::vector<Tuple> rows;         // kLiteral
    std::optional<Constraint> predicate;
    uint64_t n = 0;                  // kProductN
    std::vector<AggFn> fns;          // kProductAgg (one), kGroupAggregate
    std::vector<Plan> children;
  };

  Plan() : Plan(Node{}) {}

  static Plan Id(std::string relation) {
    Node n;
    n.op = OpKind::kId;
    n.relation = std::move(relation);
    return Plan(std::move(n));
  }
  static Plan Literal(std::vector<std::string> attrs, std::vector<Tuple> rows) {
    Node n;
    n.op = OpKind::kLiteral;
    n.attrs = std::move(attrs);
    n.rows = std::move(rows);
    return Plan(std::move(n));
  }
  static Plan Union(Plan a, Plan b) { return Binary(OpKind::kUnion, std::move(a), std::move(b)); }
  static Plan Intersection(Plan a, Plan b) {
    return Binary(OpKind::kIntersection, std::move(a), std::move(b));
  }
  static Plan Difference(Plan a, Plan b) {
    return Binary(OpKind::kDifference, std::move(a), std::move(b));
  }
  static Plan Restriction(Constraint predicate, Plan q) {
    Node n;
    n.op = OpKind::kRestriction;
    n.predicate = std::move(predicate);
    n.children = {std::move(q)};
    return Plan(std::move(n));
  }
  static Plan Projection(std::vector<std::string> attrs, Plan q) {
    Node n;
    n.op = OpKind::kProjection;
    n.attrs = std::move(attrs);
    n.children = {std::move(q)};
    return Plan(std::move(n));
  }
  static Plan Product(Plan a, Plan b) { return Binary(OpKind::kProduct, std::move(a), std::move(b)); }
  // `single` is the operand that must hold exactly one tuple.
  static Plan ProductOne(Plan q, Plan single) {
    return Binary(OpKind::kProductOne, std::move(q), std::move(single));
  }
  static Plan ProductN(uint64_t count, Plan a, Plan b) {
    Plan p = Binary(OpKind::kProductN, std::move(a), std::move(b));
    p.mutable_node().n = count;
    return p;
  }
  static Plan ProductAgg(AggFn fn, Plan a, Plan b) {
    Plan p = Binary(OpKind::kProductAgg, std::move(a), std::move(b));
    p.mutable_node().fns = {std::move(fn)};
    return p;
  }
  static Plan GroupAggregate(std::vector<std::string> group, std::vector<AggFn> fns, Plan q) {
    Node n;
    n.op = OpKind::kGroupAggregate;
    n.attrs = std::move(group);
    n.fns = std::move(fns);
    n.children = {std::move(q)};
    return Plan(std::move(n));
  }

  OpKind op() const { return node_->op; }
  const std::string& relation() const { return node_->relation; }
  const std::vector<std::string>& attrs() const { return node_->attrs; }
  const std::vector<Tuple>& rows() const { return node_->rows; }
  const Constraint& predicate() const { return *node_->predicate; }
  uint64_t n() const { return node_->n; }
  const std::vector<AggFn>& fns() const { return node_->fns; }
  const std::vector<Plan>& children() const { return node_->children; }
  const Plan& child(size_t i) const { return node_->children.at(i); }
  const Node* get() const { return node_.get(); }

  friend bool operator==(const Plan& a, const Plan& b) {
    if (a.node_ == b.node_) return true;
    const Node& x = *a.node_;
    const Node& y = *b.node_;
    return x.op == y.op && x.relation == y.relation && x.attrs == y.attrs && x.rows == y.rows &&
           x.predicate == y.predicate && x.n == y.n && x.fns == y.fns && x.children == y.children;
  }

 private:
  explicit Plan(Node n) : node_(std::make_shared<Node>(std::move(n))) {}
  static Plan Binary(OpKind op, Plan a, Plan b) {
    Node n;
    n.op = op;
    n.children = {std::move(a), std::move(b)};
    return Plan(std::move(n));
  }
  Node& mutable_node() { return const_cast<Node&>(*node_); }

  std::shared_ptr<const Node> node_;
};

// gamma_fn(body).
struct TopQuery {
  AggFn fn;
  Plan body;

  friend bool operator==(const TopQuery& a, const TopQuery& b) {
    return a.fn == b.fn && a.body == b.body;
  }
};

namespace internal {

inline std::string JoinNames(const std::vector<std::string>& names) {
  std::string out;
  for (size_t i = 0; i < names.size(); ++i) out += (i ? ", " : "") + names[i];
  return out;
}

inline void PrintPlan(const Plan& p, std::ostream& os);

// Binary operators are left-associative, so only a binary right operand
// (or a binary operand of a prefix operator) needs parentheses.
inline void PrintOperand(const Plan& p, std::ostream& os) {
  if (IsBinary(p.op())) {
    os << "(";
    PrintPlan(p, os);
    os << ")";
  } else {
    PrintPlan(p, os);
  }
}

inline void PrintPlan(const Plan& p, std::ostream& os) {
  switch (p.op()) {
    case OpKind::kId:
      os << p.relation();
      return;
    case OpKind::kLiteral: {
      if (p.rows().size() == 1) {
        os << "row(";
        for (size_t i = 0; i < p.attrs().size(); ++i) {
          os << (i ? ", " : "") << p.attrs()[i] << " = " << ToString(p.rows()[0][i]);
        }
        os << ")";
        return;
      }
      os << "values(" << JoinNames(p.attrs()) << ") {";
      for (size_t r = 0; r < p.rows().size(); ++r) {
        os << (r ? ", " : "") << "(";
        for (size_t i = 0; i < p.rows()[r].size(); ++i) {
          os << (i ? ", " : "") << ToString(p.rows()[r][i]);
        }
        os << ")";
      }
      os << "}";
      return;
    }
    case OpKind::kRestriction:
      os << "select " << ToString(p.predicate()) << " from ";
      PrintOperand(p.child(0), os);
      return;
    case OpKind::kProjection:
      os << "project " << JoinNames(p.attrs()) << " from ";
      PrintOperand(p.child(0), os);
      return;
    case OpKind::kGroupAggregate: {
      os << "group ";
      if (!p.attrs().empty()) os << JoinNames(p.attrs()) << " ";
      os << "agg ";
      for (size_t i = 0; i < p.fns().size(); ++i) os << (i ? ", " : "") << p.fns()[i].ToString();
      os << " from ";
      PrintOperand(p.child(0), os);
      return;
    }
    default:
      break;
  }
  PrintPlan(p.child(0), os);
  os << " " << OpKindName(p.op());
  if (p.op() == OpKind::kProductN) os << " " << p.n();
  if (p.op() == OpKind::kProductAgg) os << " " << p.fns()[0].ToString();
  os << " ";
  PrintOperand(p.child(1), os);
}

}  // namespace internal

// Canonical text; parses back to an equal tree.
inline std::string ToString(const Plan& p) {
  std::ostringstream os;
  internal::PrintPlan(p, os);
  return os.str();
}

inline std::string ToString(const TopQuery& q) {
  return q.fn.ToString() + " of " + ToString(q.body);
}

}  // namespace rasens

#endif  // RASENS_QUERY_HPP_
