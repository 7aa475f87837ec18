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

// Set-semantics evaluation of annotated query plans over in-memory
// relations.

#ifndef RASENS_ENGINE_HPP_
#define RASENS_ENGINE_HPP_

#include <algorithm>
#include <iterator>
#include <map>
#include <string>
#include <vector>

#include "rasens/annotate.hpp"
#include "rasens/constraint.hpp"
#include "rasens/error.hpp"
#include "rasens/query.hpp"

namespace rasens {

// A duplicate-free set of tuples, kept sorted.
struct Relation {
  std::vector<std::string> attributes;
  std::vector<Tuple> tuples;

  static Relation Make(std::vector<std::string> attributes, std::vector<Tuple> tuples) {
    Relation r{std::move(attributes), std::move(tuples)};
    r.Normalize();
    return r;
  }

  void Normalize() {
    std::sort(tuples.begin(), tuples.end());
    tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
  }

  size_t size() const { return tuples.size(); }
  bool empty() const { return tuples.empty(); }
  bool Contains(const Tuple& t) const {
    return std::binary_search(tuples.begin(), tuples.end(), t);
  }

  size_t Column(const std::string& name) const {
    auto it = std::find(attributes.begin(), attributes.end(), name);
    if (it == attributes.end()) {
      throw Error(ErrorKind::kValidation, "relation has no attribute '" + name + "'");
    }
    return static_cast<size_t>(it - attributes.begin());
  }

  friend bool operator==(const Relation& a, const Relation& b) {
    return a.attributes == b.attributes && a.tuples == b.tuples;
  }
};

using Database = std::map<std::string, Relation>;

// |a (symmetric difference) b| on tuple sets.
inline size_t HammingDistance(const Relation& a, const Relation& b) {
  size_t common = 0;
  auto i = a.tuples.begin();
  auto j = b.tuples.begin();
  while (i != a.tuples.end() && j != b.tuples.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return a.size() + b.size() - 2 * common;
}

// gamma_fn(r). On the empty relation max, min and avg take the value
// fixed by EmptyDefault for `bounds`.
inline Rational ApplyAgg(const AggFn& fn, const Relation& r, const Bounds& bounds) {
  if (fn.kind == AggKind::kCount) return Rational(static_cast<int64_t>(r.size()));
  if (r.empty()) return EmptyDefault(fn, bounds);
  const size_t col = r.Column(fn.attribute);
  Rational acc = AsNumber(r.tuples.front()[col]);
  if (fn.kind == AggKind::kSum || fn.kind == AggKind::kAvg) acc = 0;
  for (const auto& t : r.tuples) {
    const Rational& x = AsNumber(t[col]);
    switch (fn.kind) {
      case AggKind::kSum:
      case AggKind::kAvg: acc += x; break;
      case AggKind::kMax: if (x > acc) acc = x; break;
      case AggKind::kMin: if (x < acc) acc = x; break;
      default: break;
    }
  }
  if (fn.kind == AggKind::kAvg) acc /= static_cast<int64_t>(r.size());
  return acc;
}

namespace internal {

inline Relation ProductOf(const Relation& a, const Relation& b, size_t right_limit) {
  Relation out;
  out.attributes = a.attributes;
  out.attributes.insert(out.attributes.end(), b.attributes.begin(), b.attributes.end());
  const size_t m = std::min(right_limit, b.size());
  for (const auto& x : a.tuples) {
    for (size_t k = 0; k < m; ++k) {
      Tuple t = x;
      t.insert(t.end(), b.tuples[k].begin(), b.tuples[k].end());
      out.tuples.push_back(std::move(t));
    }
  }
  out.Normalize();
  return out;
}

class Evaluator {
 public:
  Evaluator(const AnnotatedPlan& plan, const Database& db, std::vector<Relation>* trace)
      : plan_(plan), db_(db), trace_(trace) {
    if (trace_) trace_->assign(plan.nodes.size(), Relation{});
  }

  Relation Eval(int id) {
    Relation r = EvalNode(plan_.node(id));
    if (trace_) (*trace_)[static_cast<size_t>(id)] = r;
    return r;
  }

 private:
  Relation EvalNode(const NodeInfo& n) {
    const Plan& p = n.plan;
    std::vector<Relation> in;
    for (int c : n.children) in.push_back(Eval(c));
    Relation out;
    out.attributes = n.schema.AttributeNames();
    switch (p.op()) {
      case OpKind::kId: {
        auto it = db_.find(p.relation());
        if (it == db_.end()) {
          throw Error(ErrorKind::kValidation, "no data for relation '" + p.relation() + "'");
        }
        if (it->second.attributes != out.attributes) {
          throw Error(ErrorKind::kValidation,
                      "data for relation '" + p.relation() + "' has mismatching attributes");
        }
        return it->second;
      }
      case OpKind::kLiteral:
        out.tuples = p.rows();
        out.Normalize();
        return out;
      case OpKind::kUnion:
        std::set_union(in[0].tuples.begin(), in[0].tuples.end(), in[1].tuples.begin(),
                       in[1].tuples.end(), std::back_inserter(out.tuples));
        return out;
      case OpKind::kIntersection:
        std::set_intersection(in[0].tuples.begin(), in[0].tuples.end(), in[1].tuples.begin(),
                              in[1].tuples.end(), std::back_inserter(out.tuples));
        return out;
      case OpKind::kDifference:
        std::set_difference(in[0].tuples.begin(), in[0].tuples.end(), in[1].tuples.begin(),
                            in[1].tuples.end(), std::back_inserter(out.tuples));
        return out;
      case OpKind::kRestriction: {
        const ConstraintEvaluator keep(p.predicate(), in[0].attributes);
        for (const auto& t : in[0].tuples) {
          if (keep(t)) out.tuples.push_back(t);
        }
        return out;
      }
      case OpKind::kProjection: {
        std::vector<size_t> cols;
        for (const auto& a : p.attrs()) cols.push_back(in[0].Column(a));
        for (const auto& t : in[0].tuples) {
          Tuple u;
          for (size_t c : cols) u.push_back(t[c]);
          out.tuples.push_back(std::move(u));
        }
        out.Normalize();
        return out;
      }
      case OpKind::kProduct:
        return ProductOf(in[0], in[1], in[1].size());
      case OpKind::kProductOne:
        if (in[1].size() != 1) {
          throw Error(ErrorKind::kRuntime, "product1: right operand has " +
                                               std::to_string(in[1].size()) +
                                               " rows, expected exactly 1");
        }
        return ProductOf(in[0], in[1], 1);
      case OpKind::kProductN:
        // Representatives: the first n right tuples in lexicographic order.
        return ProductOf(in[0], in[1], static_cast<size_t>(p.n()));
      case OpKind::kProductAgg: {
        const Rational v = ApplyAgg(p.fns()[0], in[1], n.agg_bounds[0]);
        for (const auto& t : in[0].tuples) {
          Tuple u = t;
          u.push_back(v);
          out.tuples.push_back(std::move(u));
        }
        return out;
      }
      case OpKind::kGroupAggregate:
        return Group(n, in[0], std::move(out));
    }
    throw std::logic_error("Evaluator: unknown operator");
  }

  static Relation Group(const NodeInfo& n, const Relation& in, Relation out) {
    const Plan& p = n.plan;
    std::vector<size_t> cols;
    for (const auto& a : p.attrs()) cols.push_back(in.Column(a));
    std::map<Tuple, Relation> groups;
    if (cols.empty()) groups[Tuple{}] = Relation{in.attributes, {}};
    for (const auto& t : in.tuples) {
      Tuple key;
      for (size_t c : cols) key.push_back(t[c]);
      Relation& g = groups[key];
      g.attributes = in.attributes;
      g.tuples.push_back(t);  // stays sorted: input is sorted
    }
    for (const auto& [key, rows] : groups) {
      Tuple u = key;
      for (size_t i = 0; i < p.fns().size(); ++i) {
        u.push_back(ApplyAgg(p.fns()[i], rows, n.agg_bounds[i]));
      }
      out.tuples.push_back(std::move(u));
    }
    out.Normalize();
    return out;
  }

  const AnnotatedPlan& plan_;
  const Database& db_;
  std::vector<Relation>* trace_;
};

}  // namespace internal

// Q(db). When `trace` is given it receives every node's output, indexed by
// preorder node id.
inline Relation Evaluate(const AnnotatedPlan& plan, const Database& db,
                         std::vector<Relation>* trace = nullptr) {
  return internal::Evaluator(plan, db, trace).Eval(0);
}

// gamma_f(Q(db)), exact.
inline Rational Evaluate(const AnnotatedQuery& q, const Database& db,
                         std::vector<Relation>* trace = nullptr) {
  const Relation r = Evaluate(q.plan, db, trace);
  return ApplyAgg(q.query.fn, r, q.top_bounds);
}

}  // namespace rasens

#endif  // RASENS_ENGINE_HPP_
