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

// Constraint language: values, attribute domains, terms, constraints and
// constrained schemas. All types here are immutable values backed by shared
// nodes, so copies are cheap and safe to hand to concurrent workers.

#ifndef RASENS_CONSTRAINT_HPP_
#define RASENS_CONSTRAINT_HPP_

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "rasens/error.hpp"
#include "rasens/rational.hpp"

namespace rasens {

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

// Numbers order before strings; numbers by value, strings by byte order.
using Value = std::variant<Rational, std::string>;
using Tuple = std::vector<Value>;

inline bool IsNumber(const Value& v) { return v.index() == 0; }
inline const Rational& AsNumber(const Value& v) { return std::get<0>(v); }
inline const std::string& AsString(const Value& v) { return std::get<1>(v); }

inline std::string QuoteString(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline std::string ToString(const Value& v) {
  return IsNumber(v) ? ToDecimalString(AsNumber(v)) : QuoteString(AsString(v));
}

// ---------------------------------------------------------------------------
// Domain
// ---------------------------------------------------------------------------

class Domain {
 public:
  enum class Kind { kIntInterval, kRealInterval, kNumberSet, kStringSet };

  static Domain IntInterval(ExtRational lo, ExtRational hi) {
    Domain d(Kind::kIntInterval);
    if (lo.is_pos_inf() || hi.is_neg_inf()) {
      throw Error(ErrorKind::kValidation, "int interval with inverted infinite bound");
    }
    d.lower_ = lo.is_finite() ? ExtRational(Rational(Ceil(lo.value()))) : lo;
    d.upper_ = hi.is_finite() ? ExtRational(Rational(Floor(hi.value()))) : hi;
    if (d.upper_ < d.lower_) {
      throw Error(ErrorKind::kValidation, "empty int interval [" + lo.ToString() +
                                              ", " + hi.ToString() + "]");
    }
    return d;
  }

  static Domain RealInterval(ExtRational lo, ExtRational hi, bool lower_open = false,
                             bool upper_open = false) {
    Domain d(Kind::kRealInterval);
    if (lo.is_pos_inf() || hi.is_neg_inf()) {
      throw Error(ErrorKind::kValidation, "real interval with inverted infinite bound");
    }
    d.lower_ = std::move(lo);
    d.upper_ = std::move(hi);
    d.lower_open_ = lower_open || !d.lower_.is_finite();
    d.upper_open_ = upper_open || !d.upper_.is_finite();
    if (d.upper_ < d.lower_ ||
        (d.upper_ == d.lower_ && (d.lower_open_ || d.upper_open_))) {
      throw Error(ErrorKind::kValidation, "empty real interval");
    }
    return d;
  }

  static Domain NumberSet(std::vector<Rational> values) {
    Domain d(Kind::kNumberSet);
    std::sort(values.begin(), values.end());
    if (values.empty()) throw Error(ErrorKind::kValidation, "empty number enumeration");
    if (std::adjacent_find(values.begin(), values.end()) != values.end()) {
      throw Error(ErrorKind::kValidation, "duplicate value in number enumeration");
    }
    d.lower_ = values.front();
    d.upper_ = values.back();
    d.numbers_ = std::move(values);
    return d;
  }

  static Domain StringSet(std::vector<std::string> values) {
    Domain d(Kind::kStringSet);
    std::sort(values.begin(), values.end());
    if (values.empty()) throw Error(ErrorKind::kValidation, "empty string enumeration");
    if (std::adjacent_find(values.begin(), values.end()) != values.end()) {
      throw Error(ErrorKind::kValidation, "duplicate value in string enumeration");
    }
    d.strings_ = std::move(values);
    return d;
  }

  Kind kind() const { return kind_; }
  bool is_numeric() const { return kind_ != Kind::kStringSet; }
  bool is_integral() const { return kind_ == Kind::kIntInterval; }
  // Hull endpoints; meaningful for numeric domains only.
  const ExtRational& lower() const { return lower_; }
  const ExtRational& upper() const { return upper_; }
  bool lower_open() const { return lower_open_; }
  bool upper_open() const { return upper_open_; }
  const std::vector<Rational>& numbers() const { return numbers_; }
  const std::vector<std::string>& strings() const { return strings_; }

  bool Contains(const Value& v) const {
    switch (kind_) {
      case Kind::kStringSet:
        return !IsNumber(v) &&
               std::binary_search(strings_.begin(), strings_.end(), AsString(v));
      case Kind::kNumberSet:
        return IsNumber(v) &&
               std::binary_search(numbers_.begin(), numbers_.end(), AsNumber(v));
      case Kind::kIntInterval:
        if (!IsNumber(v) || !IsInteger(AsNumber(v))) return false;
        return lower_ <= ExtRational(AsNumber(v)) && ExtRational(AsNumber(v)) <= upper_;
      case Kind::kRealInterval: {
        if (!IsNumber(v)) return false;
        ExtRational x(AsNumber(v));
        if (lower_open_ ? !(lower_ < x) : x < lower_) return false;
        if (upper_open_ ? !(x < upper_) : upper_ < x) return false;
        return true;
      }
    }
    return false;
  }

  // Number of members; nullopt for infinite domains.
  std::optional<Integer> Size() const {
    switch (kind_) {
      case Kind::kStringSet: return Integer(strings_.size());
      case Kind::kNumberSet: return Integer(numbers_.size());
      case Kind::kIntInterval:
        if (!lower_.is_finite() || !upper_.is_finite()) return std::nullopt;
        return Integer(boost::multiprecision::numerator(upper_.value()) -
                       boost::multiprecision::numerator(lower_.value()) + 1);
      case Kind::kRealInterval:
        if (lower_ == upper_) return Integer(1);
        return std::nullopt;
    }
    return std::nullopt;
  }

  // Smallest domain of a supported kind containing both.
  static Domain Join(const Domain& a, const Domain& b) {
    if (a.is_numeric() != b.is_numeric()) {
      throw Error(ErrorKind::kType, "cannot join numeric and string domains");
    }
    if (!a.is_numeric()) {
      std::vector<std::string> all = a.strings_;
      all.insert(all.end(), b.strings_.begin(), b.strings_.end());
      std::sort(all.begin(), all.end());
      all.erase(std::unique(all.begin(), all.end()), all.end());
      return StringSet(std::move(all));
    }
    if (a.kind_ == Kind::kNumberSet && b.kind_ == Kind::kNumberSet) {
      std::vector<Rational> all = a.numbers_;
      all.insert(all.end(), b.numbers_.begin(), b.numbers_.end());
      std::sort(all.begin(), all.end());
      all.erase(std::unique(all.begin(), all.end()), all.end());
      return NumberSet(std::move(all));
    }
    const ExtRational lo = std::min(a.lower_, b.lower_);
    const ExtRational hi = std::max(a.upper_, b.upper_);
    if (a.IntegralValued() && b.IntegralValued()) return IntInterval(lo, hi);
    auto open_at = [](const Domain& d, const ExtRational& x, bool lower) {
      if ((lower ? d.lower_ : d.upper_) != x) return true;
      return lower ? d.lower_open_ : d.upper_open_;
    };
    return RealInterval(lo, hi, open_at(a, lo, true) && open_at(b, lo, true),
                        open_at(a, hi, false) && open_at(b, hi, false));
  }

  // Schema-file syntax.
  std::string ToString() const {
    auto list = [](const auto& xs, auto render) {
      std::string out = "{";
      for (size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += render(xs[i]);
      }
      return out + "}";
    };
    switch (kind_) {
      case Kind::kStringSet:
        return "string in " + list(strings_, [](const std::string& s) { return QuoteString(s); });
      case Kind::kNumberSet:
        return "num in " + list(numbers_, [](const Rational& r) { return ToDecimalString(r); });
      case Kind::kIntInterval:
        return "int [" + Endpoint(lower_) + ", " + Endpoint(upper_) + "]";
      case Kind::kRealInterval:
        return std::string("real ") + (lower_open_ ? "(" : "[") + Endpoint(lower_) + ", " +
               Endpoint(upper_) + (upper_open_ ? ")" : "]");
    }
    return "";
  }

  friend bool operator==(const Domain& a, const Domain& b) {
    return a.kind_ == b.kind_ && a.lower_ == b.lower_ && a.upper_ == b.upper_ &&
           a.lower_open_ == b.lower_open_ && a.upper_open_ == b.upper_open_ &&
           a.numbers_ == b.numbers_ && a.strings_ == b.strings_;
  }

 private:
  explicit Domain(Kind kind) : kind_(kind) {}

  bool IntegralValued() const {
    if (kind_ == Kind::kIntInterval) return true;
    return kind_ == Kind::kNumberSet &&
           std::all_of(numbers_.begin(), numbers_.end(),
                       [](const Rational& r) { return IsInteger(r); });
  }

  static std::string Endpoint(const ExtRational& x) {
    return x.is_finite() ? ToDecimalString(x.value()) : x.ToString();
  }

  Kind kind_;
  ExtRational lower_ = ExtRational::NegInf();
  ExtRational upper_ = ExtRational::PosInf();
  bool lower_open_ = false;
  bool upper_open_ = false;
  std::vector<Rational> numbers_;
  std::vector<std::string> strings_;
};

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

class Term {
 public:
  enum class Kind { kAttribute, kNumber, kString, kAdd, kSub, kMul, kNeg };

  static Term Attribute(std::string name) { return Term(Kind::kAttribute, std::move(name)); }
  static Term Number(Rational value) {
    Term t(Kind::kNumber, "");
    t.mutable_node().number = std::move(value);
    return t;
  }
  static Term Number(int64_t value) { return Number(Rational(value)); }
  static Term String(std::string s) { return Term(Kind::kString, std::move(s)); }
  static Term Add(Term a, Term b) { return Arith(Kind::kAdd, std::move(a), std::move(b)); }
  static Term Sub(Term a, Term b) { return Arith(Kind::kSub, std::move(a), std::move(b)); }
  static Term Mul(Term a, Term b) { return Arith(Kind::kMul, std::move(a), std::move(b)); }
  static Term Neg(Term a) {
    if (a.kind() == Kind::kString) throw Error(ErrorKind::kType, "negation of a string");
    Term t(Kind::kNeg, "");
    t.mutable_node().args = {std::move(a)};
    return t;
  }

  Kind kind() const { return node_->kind; }
  // Attribute name or string constant.
  const std::string& text() const { return node_->text; }
  const Rational& number() const { return node_->number; }
  const Term& lhs() const { return node_->args.at(0); }
  const Term& rhs() const { return node_->args.at(1); }
  const std::vector<Term>& args() const { return node_->args; }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    return a.kind() == b.kind() && a.text() == b.text() && a.number() == b.number() &&
           a.args() == b.args();
  }

 private:
  struct Node {
    Kind kind;
    std::string text;
    Rational number = 0;
    std::vector<Term> args;
  };

  Term(Kind kind, std::string text)
      : node_(std::make_shared<Node>(Node{kind, std::move(text), 0, {}})) {}

  Node& mutable_node() { return const_cast<Node&>(*node_); }

  static Term Arith(Kind kind, Term a, Term b) {
    if (a.kind() == Kind::kString || b.kind() == Kind::kString) {
      throw Error(ErrorKind::kType, "arithmetic on a string constant");
    }
    Term t(kind, "");
    t.mutable_node().args = {std::move(a), std::move(b)};
    return t;
  }

  std::shared_ptr<const Node> node_;
};

inline Term Attr(std::string name) { return Term::Attribute(std::move(name)); }
inline Term Num(const Rational& v) { return Term::Number(v); }
inline Term Num(int64_t v) { return Term::Number(v); }
inline Term Str(std::string s) { return Term::String(std::move(s)); }
inline Term operator+(Term a, Term b) { return Term::Add(std::move(a), std::move(b)); }
inline Term operator-(Term a, Term b) { return Term::Sub(std::move(a), std::move(b)); }
inline Term operator*(Term a, Term b) { return Term::Mul(std::move(a), std::move(b)); }
inline Term operator-(Term a) { return Term::Neg(std::move(a)); }

// ---------------------------------------------------------------------------
// Constraints
// ---------------------------------------------------------------------------

enum class Predicate { kLe, kLt, kGe, kGt, kEq, kNe, kIn, kNotIn };

inline bool IsOrderPredicate(Predicate p) {
  return p == Predicate::kLe || p == Predicate::kLt || p == Predicate::kGe ||
         p == Predicate::kGt;
}

inline Predicate Complement(Predicate p) {
  switch (p) {
    case Predicate::kLe: return Predicate::kGt;
    case Predicate::kLt: return Predicate::kGe;
    case Predicate::kGe: return Predicate::kLt;
    case Predicate::kGt: return Predicate::kLe;
    case Predicate::kEq: return Predicate::kNe;
    case Predicate::kNe: return Predicate::kEq;
    case Predicate::kIn: return Predicate::kNotIn;
    case Predicate::kNotIn: return Predicate::kIn;
  }
  return p;
}

inline const char* PredicateSymbol(Predicate p) {
  switch (p) {
    case Predicate::kLe: return "<=";
    case Predicate::kLt: return "<";
    case Predicate::kGe: return ">=";
    case Predicate::kGt: return ">";
    case Predicate::kEq: return "=";
    case Predicate::kNe: return "!=";
    case Predicate::kIn: return "in";
    case Predicate::kNotIn: return "not in";
  }
  return "?";
}

class Constraint {
 public:
  enum class Kind { kTrue, kFalse, kAtom, kNot, kAnd, kOr, kIff };

  static Constraint True() { return Constraint(Kind::kTrue); }
  static Constraint False() { return Constraint(Kind::kFalse); }

  static Constraint Compare(Predicate p, Term lhs, Term rhs) {
    if (p == Predicate::kIn || p == Predicate::kNotIn) {
      throw std::logic_error("Compare: use Member for set predicates");
    }
    const bool ls = lhs.kind() == Term::Kind::kString;
    const bool rs = rhs.kind() == Term::Kind::kString;
    if (IsOrderPredicate(p) && (ls || rs)) {
      throw Error(ErrorKind::kType, std::string("ordering predicate '") + PredicateSymbol(p) +
                                        "' applied to a string");
    }
    if ((ls && IsNumericLiteral(rhs)) || (rs && IsNumericLiteral(lhs))) {
      throw Error(ErrorKind::kType, "comparison between a string and a number");
    }
    Constraint c(Kind::kAtom);
    c.mutable_node().predicate = p;
    c.mutable_node().terms = {std::move(lhs), std::move(rhs)};
    return c;
  }

  static Constraint Member(Term t, std::vector<Value> values, bool negated = false) {
    if (values.empty()) throw Error(ErrorKind::kValidation, "empty value set in 'in'");
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    const bool numbers = IsNumber(values.front());
    for (const auto& v : values) {
      if (IsNumber(v) != numbers) {
        throw Error(ErrorKind::kType, "value set mixes numbers and strings");
      }
    }
    if (t.kind() == Term::Kind::kString && numbers) {
      throw Error(ErrorKind::kType, "string tested against a number set");
    }
    if (IsNumericLiteral(t) && !numbers) {
      throw Error(ErrorKind::kType, "number tested against a string set");
    }
    Constraint c(Kind::kAtom);
    c.mutable_node().predicate = negated ? Predicate::kNotIn : Predicate::kIn;
    c.mutable_node().terms = {std::move(t)};
    c.mutable_node().values = std::move(values);
    return c;
  }

  static Constraint Not(Constraint operand) {
    Constraint c(Kind::kNot);
    c.mutable_node().children = {std::move(operand)};
    return c;
  }

  // Flattens nested conjunctions, drops `true`, collapses on `false`.
  static Constraint And(std::vector<Constraint> parts) {
    return Junction(Kind::kAnd, std::move(parts));
  }
  static Constraint Or(std::vector<Constraint> parts) {
    return Junction(Kind::kOr, std::move(parts));
  }

  static Constraint Iff(Constraint a, Constraint b) {
    Constraint c(Kind::kIff);
    c.mutable_node().children = {std::move(a), std::move(b)};
    return c;
  }

  Kind kind() const { return node_->kind; }
  bool is_true() const { return kind() == Kind::kTrue; }
  bool is_false() const { return kind() == Kind::kFalse; }
  Predicate predicate() const { return node_->predicate; }
  const Term& lhs() const { return node_->terms.at(0); }
  const Term& rhs() const { return node_->terms.at(1); }
  // Sorted, duplicate-free member list of an in/not-in atom.
  const std::vector<Value>& values() const { return node_->values; }
  const std::vector<Constraint>& children() const { return node_->children; }
  const Constraint& operand() const { return node_->children.at(0); }

  friend bool operator==(const Constraint& a, const Constraint& b) {
    if (a.node_ == b.node_) return true;
    return a.kind() == b.kind() && a.node_->predicate == b.node_->predicate &&
           a.node_->terms == b.node_->terms && a.node_->values == b.node_->values &&
           a.children() == b.children();
  }

 private:
  struct Node {
    Kind kind;
    Predicate predicate = Predicate::kEq;
    std::vector<Term> terms;
    std::vector<Value> values;
    std::vector<Constraint> children;
  };

  explicit Constraint(Kind kind) : node_(std::make_shared<Node>()) { mutable_node().kind = kind; }

  Node& mutable_node() { return const_cast<Node&>(*node_); }

  static bool IsNumericLiteral(const Term& t) {
    return t.kind() != Term::Kind::kString && t.kind() != Term::Kind::kAttribute;
  }

  static Constraint Junction(Kind kind, std::vector<Constraint> parts) {
    const Kind unit = kind == Kind::kAnd ? Kind::kTrue : Kind::kFalse;
    const Kind absorbing = kind == Kind::kAnd ? Kind::kFalse : Kind::kTrue;
    std::vector<Constraint> flat;
    for (auto& p : parts) {
      if (p.kind() == unit) continue;
      if (p.kind() == absorbing) return Constraint(absorbing);
      if (p.kind() == kind) {
        flat.insert(flat.end(), p.children().begin(), p.children().end());
      } else {
        flat.push_back(std::move(p));
      }
    }
    if (flat.empty()) return Constraint(unit);
    if (flat.size() == 1) return flat.front();
    Constraint c(kind);
    c.mutable_node().children = std::move(flat);
    return c;
  }

  std::shared_ptr<const Node> node_;
};

inline Constraint Le(Term a, Term b) { return Constraint::Compare(Predicate::kLe, std::move(a), std::move(b)); }
inline Constraint Lt(Term a, Term b) { return Constraint::Compare(Predicate::kLt, std::move(a), std::move(b)); }
inline Constraint Ge(Term a, Term b) { return Constraint::Compare(Predicate::kGe, std::move(a), std::move(b)); }
inline Constraint Gt(Term a, Term b) { return Constraint::Compare(Predicate::kGt, std::move(a), std::move(b)); }
inline Constraint Eq(Term a, Term b) { return Constraint::Compare(Predicate::kEq, std::move(a), std::move(b)); }
inline Constraint Ne(Term a, Term b) { return Constraint::Compare(Predicate::kNe, std::move(a), std::move(b)); }
inline Constraint In(Term t, std::vector<Value> vs) { return Constraint::Member(std::move(t), std::move(vs)); }

// Composition of constraints: the solution set of the result is the
// intersection of both solution sets.
inline Constraint Conjoin(Constraint a, Constraint b) {
  return Constraint::And({std::move(a), std::move(b)});
}

inline Constraint Disjoin(Constraint a, Constraint b) {
  return Constraint::Or({std::move(a), std::move(b)});
}

namespace internal {

inline Constraint Nnf(const Constraint& c, bool negate) {
  using K = Constraint::Kind;
  switch (c.kind()) {
    case K::kTrue: return negate ? Constraint::False() : c;
    case K::kFalse: return negate ? Constraint::True() : c;
    case K::kAtom: {
      if (!negate) return c;
      const Predicate p = Complement(c.predicate());
      if (p == Predicate::kIn || p == Predicate::kNotIn) {
        return Constraint::Member(c.lhs(), c.values(), p == Predicate::kNotIn);
      }
      return Constraint::Compare(p, c.lhs(), c.rhs());
    }
    case K::kNot: return Nnf(c.operand(), !negate);
    case K::kAnd:
    case K::kOr: {
      std::vector<Constraint> parts;
      for (const auto& ch : c.children()) parts.push_back(Nnf(ch, negate));
      const bool conj = (c.kind() == K::kAnd) != negate;
      return conj ? Constraint::And(std::move(parts)) : Constraint::Or(std::move(parts));
    }
    case K::kIff: {
      const Constraint& a = c.children()[0];
      const Constraint& b = c.children()[1];
      return Constraint::Or({Constraint::And({Nnf(a, false), Nnf(b, negate)}),
                             Constraint::And({Nnf(a, true), Nnf(b, !negate)})});
    }
  }
  return c;
}

}  // namespace internal

// Negation normal form: negations are absorbed into atoms (complemented
// predicates), equivalences are rewritten as (a and b) or (not a and not b),
// and/or are flattened. The solution set is unchanged.
inline Constraint Normalize(const Constraint& c) { return internal::Nnf(c, false); }

// ---------------------------------------------------------------------------
// Traversals
// ---------------------------------------------------------------------------

inline void CollectAttributes(const Term& t, std::set<std::string>& out) {
  if (t.kind() == Term::Kind::kAttribute) out.insert(t.text());
  for (const auto& a : t.args()) CollectAttributes(a, out);
}

inline void CollectAttributes(const Constraint& c, std::set<std::string>& out) {
  if (c.kind() == Constraint::Kind::kAtom) {
    CollectAttributes(c.lhs(), out);
    if (c.predicate() != Predicate::kIn && c.predicate() != Predicate::kNotIn) {
      CollectAttributes(c.rhs(), out);
    }
  }
  for (const auto& ch : c.children()) CollectAttributes(ch, out);
}

inline std::set<std::string> MentionedAttributes(const Constraint& c) {
  std::set<std::string> out;
  CollectAttributes(c, out);
  return out;
}

inline Term Rename(const Term& t, const std::map<std::string, std::string>& names) {
  switch (t.kind()) {
    case Term::Kind::kAttribute: {
      auto it = names.find(t.text());
      return it == names.end() ? t : Term::Attribute(it->second);
    }
    case Term::Kind::kNumber:
    case Term::Kind::kString: return t;
    case Term::Kind::kNeg: return Term::Neg(Rename(t.lhs(), names));
    case Term::Kind::kAdd: return Term::Add(Rename(t.lhs(), names), Rename(t.rhs(), names));
    case Term::Kind::kSub: return Term::Sub(Rename(t.lhs(), names), Rename(t.rhs(), names));
    case Term::Kind::kMul: return Term::Mul(Rename(t.lhs(), names), Rename(t.rhs(), names));
  }
  return t;
}

inline Constraint Rename(const Constraint& c, const std::map<std::string, std::string>& names) {
  using K = Constraint::Kind;
  if (names.empty()) return c;
  switch (c.kind()) {
    case K::kTrue:
    case K::kFalse: return c;
    case K::kAtom:
      if (c.predicate() == Predicate::kIn || c.predicate() == Predicate::kNotIn) {
        return Constraint::Member(Rename(c.lhs(), names), c.values(),
                                  c.predicate() == Predicate::kNotIn);
      }
      return Constraint::Compare(c.predicate(), Rename(c.lhs(), names), Rename(c.rhs(), names));
    case K::kNot: return Constraint::Not(Rename(c.operand(), names));
    case K::kIff:
      return Constraint::Iff(Rename(c.children()[0], names), Rename(c.children()[1], names));
    case K::kAnd:
    case K::kOr: {
      std::vector<Constraint> parts;
      for (const auto& ch : c.children()) parts.push_back(Rename(ch, names));
      return c.kind() == K::kAnd ? Constraint::And(std::move(parts))
                                 : Constraint::Or(std::move(parts));
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Printing (round-trips through the parser)
// ---------------------------------------------------------------------------

namespace internal {

inline int TermPrecedence(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::kAdd:
    case Term::Kind::kSub: return 1;
    case Term::Kind::kMul: return 2;
    case Term::Kind::kNeg: return 3;
    default: return 4;
  }
}

inline std::string PrintTerm(const Term& t) {
  auto wrap = [](const Term& child, bool parens) {
    std::string s = PrintTerm(child);
    return parens ? "(" + s + ")" : s;
  };
  switch (t.kind()) {
    case Term::Kind::kAttribute: return t.text();
    case Term::Kind::kString: return QuoteString(t.text());
    case Term::Kind::kNumber: return ToDecimalString(t.number());
    case Term::Kind::kNeg:
      return "-" + wrap(t.lhs(), TermPrecedence(t.lhs()) < 3 ||
                                     t.lhs().kind() == Term::Kind::kNumber ||
                                     t.lhs().kind() == Term::Kind::kNeg);
    default: {
      const int p = TermPrecedence(t);
      const char* op = t.kind() == Term::Kind::kAdd ? " + "
                       : t.kind() == Term::Kind::kSub ? " - " : " * ";
      return wrap(t.lhs(), TermPrecedence(t.lhs()) < p) + op +
             wrap(t.rhs(), TermPrecedence(t.rhs()) <= p);
    }
  }
}

inline int ConstraintPrecedence(const Constraint& c) {
  switch (c.kind()) {
    case Constraint::Kind::kIff: return 1;
    case Constraint::Kind::kOr: return 2;
    case Constraint::Kind::kAnd: return 3;
    case Constraint::Kind::kNot: return 4;
    default: return 5;
  }
}

inline std::string PrintConstraint(const Constraint& c) {
  auto wrap = [](const Constraint& child, bool parens) {
    std::string s = PrintConstraint(child);
    return parens ? "(" + s + ")" : s;
  };
  using K = Constraint::Kind;
  switch (c.kind()) {
    case K::kTrue: return "true";
    case K::kFalse: return "false";
    case K::kAtom: {
      if (c.predicate() == Predicate::kIn || c.predicate() == Predicate::kNotIn) {
        std::string out = PrintTerm(c.lhs()) + " " + PredicateSymbol(c.predicate()) + " {";
        for (size_t i = 0; i < c.values().size(); ++i) {
          if (i) out += ", ";
          out += ToString(c.values()[i]);
        }
        return out + "}";
      }
      return PrintTerm(c.lhs()) + " " + PredicateSymbol(c.predicate()) + " " +
             PrintTerm(c.rhs());
    }
    case K::kNot: return "not " + wrap(c.operand(), ConstraintPrecedence(c.operand()) < 4);
    case K::kIff:
      return wrap(c.children()[0], ConstraintPrecedence(c.children()[0]) < 1) + " iff " +
             wrap(c.children()[1], ConstraintPrecedence(c.children()[1]) <= 1);
    case K::kAnd:
    case K::kOr: {
      const int p = ConstraintPrecedence(c);
      std::string out;
      for (size_t i = 0; i < c.children().size(); ++i) {
        if (i) out += c.kind() == K::kAnd ? " and " : " or ";
        out += wrap(c.children()[i], ConstraintPrecedence(c.children()[i]) <= p);
      }
      return out;
    }
  }
  return "";
}

}  // namespace internal

inline std::string ToString(const Term& t) { return internal::PrintTerm(t); }
inline std::string ToString(const Constraint& c) { return internal::PrintConstraint(c); }

// ---------------------------------------------------------------------------
// Constrained schema
// ---------------------------------------------------------------------------

struct Attribute {
  std::string name;
  Domain domain;

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

// A relation name, its visible attributes and a check constraint. `hidden`
// lists attributes that were projected away upstream: the constraint may
// still mention them and they are read as existentially quantified.
struct ConstrainedSchema {
  std::string name;
  std::vector<Attribute> attributes;
  std::vector<Attribute> hidden;
  Constraint constraint = Constraint::True();

  const Attribute* Find(std::string_view attr) const {
    for (const auto& a : attributes) {
      if (a.name == attr) return &a;
    }
    for (const auto& a : hidden) {
      if (a.name == attr) return &a;
    }
    return nullptr;
  }

  std::optional<size_t> IndexOf(std::string_view attr) const {
    for (size_t i = 0; i < attributes.size(); ++i) {
      if (attributes[i].name == attr) return i;
    }
    return std::nullopt;
  }

  std::vector<std::string> AttributeNames() const {
    std::vector<std::string> out;
    for (const auto& a : attributes) out.push_back(a.name);
    return out;
  }
};

// a in D as a constraint.
inline Constraint DomainConstraint(const Attribute& a) {
  const Domain& d = a.domain;
  switch (d.kind()) {
    case Domain::Kind::kStringSet: {
      std::vector<Value> vs(d.strings().begin(), d.strings().end());
      return Constraint::Member(Attr(a.name), std::move(vs));
    }
    case Domain::Kind::kNumberSet: {
      std::vector<Value> vs(d.numbers().begin(), d.numbers().end());
      return Constraint::Member(Attr(a.name), std::move(vs));
    }
    default: {
      std::vector<Constraint> parts;
      if (d.lower().is_finite()) {
        parts.push_back(d.lower_open() ? Gt(Attr(a.name), Num(d.lower().value()))
                                       : Ge(Attr(a.name), Num(d.lower().value())));
      }
      if (d.upper().is_finite()) {
        parts.push_back(d.upper_open() ? Lt(Attr(a.name), Num(d.upper().value()))
                                       : Le(Attr(a.name), Num(d.upper().value())));
      }
      return Constraint::And(std::move(parts));
    }
  }
}

// C_I: conjunction of the domain memberships of every visible attribute.
inline Constraint DomainConstraint(const ConstrainedSchema& s) {
  std::vector<Constraint> parts;
  for (const auto& a : s.attributes) parts.push_back(DomainConstraint(a));
  return Constraint::And(std::move(parts));
}

enum class ValueType { kNumber, kString };

inline ValueType TypeOf(const Term& t, const ConstrainedSchema& s) {
  switch (t.kind()) {
    case Term::Kind::kAttribute: {
      const Attribute* a = s.Find(t.text());
      if (!a) {
        throw Error(ErrorKind::kValidation,
                    "unknown attribute '" + t.text() + "' in relation '" + s.name + "'");
      }
      return a->domain.is_numeric() ? ValueType::kNumber : ValueType::kString;
    }
    case Term::Kind::kNumber: return ValueType::kNumber;
    case Term::Kind::kString: return ValueType::kString;
    default:
      for (const auto& arg : t.args()) {
        if (TypeOf(arg, s) != ValueType::kNumber) {
          throw Error(ErrorKind::kType, "arithmetic on string term '" + ToString(arg) + "'");
        }
      }
      return ValueType::kNumber;
  }
}

// Checks attribute references and predicate/term typing against `s`.
inline void TypeCheck(const Constraint& c, const ConstrainedSchema& s) {
  if (c.kind() == Constraint::Kind::kAtom) {
    const ValueType lt = TypeOf(c.lhs(), s);
    if (c.predicate() == Predicate::kIn || c.predicate() == Predicate::kNotIn) {
      const bool numbers = IsNumber(c.values().front());
      if ((lt == ValueType::kNumber) != numbers) {
        throw Error(ErrorKind::kType, "type mismatch in '" + ToString(c) + "'");
      }
      return;
    }
    const ValueType rt = TypeOf(c.rhs(), s);
    if (IsOrderPredicate(c.predicate()) && (lt != ValueType::kNumber || rt != ValueType::kNumber)) {
      throw Error(ErrorKind::kType, "ordering on strings in '" + ToString(c) + "'");
    }
    if (lt != rt) throw Error(ErrorKind::kType, "type mismatch in '" + ToString(c) + "'");
    return;
  }
  for (const auto& ch : c.children()) TypeCheck(ch, s);
}

// Invariants of a declared (base) schema.
inline void ValidateSchema(const ConstrainedSchema& s) {
  std::set<std::string> names;
  for (const auto& a : s.attributes) {
    if (!names.insert(a.name).second) {
      throw Error(ErrorKind::kValidation,
                  "duplicate attribute '" + a.name + "' in relation '" + s.name + "'");
    }
  }
  for (const auto& a : s.hidden) {
    if (!names.insert(a.name).second) {
      throw Error(ErrorKind::kValidation, "hidden attribute clash '" + a.name + "'");
    }
  }
  TypeCheck(s.constraint, s);
}

// ---------------------------------------------------------------------------
// Compiled evaluation
// ---------------------------------------------------------------------------

// A constraint with attribute references resolved to tuple slots, evaluated
// against concrete tuples.
class ConstraintEvaluator {
 public:
  ConstraintEvaluator(const Constraint& c, const std::vector<std::string>& slots) {
    root_ = CompileConstraint(c, slots);
  }

  bool operator()(std::span<const Value> tuple) const { return Eval(root_, tuple); }

 private:
  struct CTerm {
    Term::Kind kind;
    int slot = -1;
    Value constant;
    int a = -1, b = -1;
  };
  struct CNode {
    Constraint::Kind kind;
    Predicate predicate = Predicate::kEq;
    int lhs = -1, rhs = -1;
    std::vector<Value> values;
    std::vector<int> children;
  };

  int CompileTerm(const Term& t, const std::vector<std::string>& slots) {
    CTerm ct;
    ct.kind = t.kind();
    switch (t.kind()) {
      case Term::Kind::kAttribute: {
        auto it = std::find(slots.begin(), slots.end(), t.text());
        if (it == slots.end()) {
          throw Error(ErrorKind::kValidation, "unknown attribute '" + t.text() + "'");
        }
        ct.slot = static_cast<int>(it - slots.begin());
        break;
      }
      case Term::Kind::kNumber: ct.constant = t.number(); break;
      case Term::Kind::kString: ct.constant = t.text(); break;
      default:
        ct.a = CompileTerm(t.lhs(), slots);
        if (t.args().size() > 1) ct.b = CompileTerm(t.rhs(), slots);
    }
    terms_.push_back(std::move(ct));
    return static_cast<int>(terms_.size()) - 1;
  }

  int CompileConstraint(const Constraint& c, const std::vector<std::string>& slots) {
    CNode n;
    n.kind = c.kind();
    if (c.kind() == Constraint::Kind::kAtom) {
      n.predicate = c.predicate();
      n.lhs = CompileTerm(c.lhs(), slots);
      if (c.predicate() == Predicate::kIn || c.predicate() == Predicate::kNotIn) {
        n.values = c.values();
      } else {
        n.rhs = CompileTerm(c.rhs(), slots);
      }
    }
    for (const auto& ch : c.children()) n.children.push_back(CompileConstraint(ch, slots));
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  Value EvalTerm(int idx, std::span<const Value> tuple) const {
    const CTerm& t = terms_[idx];
    switch (t.kind) {
      case Term::Kind::kAttribute: return tuple[t.slot];
      case Term::Kind::kNumber:
      case Term::Kind::kString: return t.constant;
      case Term::Kind::kNeg: return Rational(-AsNumeric(EvalTerm(t.a, tuple)));
      case Term::Kind::kAdd:
        return Rational(AsNumeric(EvalTerm(t.a, tuple)) + AsNumeric(EvalTerm(t.b, tuple)));
      case Term::Kind::kSub:
        return Rational(AsNumeric(EvalTerm(t.a, tuple)) - AsNumeric(EvalTerm(t.b, tuple)));
      case Term::Kind::kMul:
        return Rational(AsNumeric(EvalTerm(t.a, tuple)) * AsNumeric(EvalTerm(t.b, tuple)));
    }
    return t.constant;
  }

  static const Rational& AsNumeric(const Value& v) {
    if (!IsNumber(v)) throw Error(ErrorKind::kType, "arithmetic on a string value");
    return AsNumber(v);
  }

  bool Eval(int idx, std::span<const Value> tuple) const {
    const CNode& n = nodes_[idx];
    using K = Constraint::Kind;
    switch (n.kind) {
      case K::kTrue: return true;
      case K::kFalse: return false;
      case K::kNot: return !Eval(n.children[0], tuple);
      case K::kAnd:
        for (int ch : n.children) {
          if (!Eval(ch, tuple)) return false;
        }
        return true;
      case K::kOr:
        for (int ch : n.children) {
          if (Eval(ch, tuple)) return true;
        }
        return false;
      case K::kIff: return Eval(n.children[0], tuple) == Eval(n.children[1], tuple);
      case K::kAtom: break;
    }
    const Value l = EvalTerm(n.lhs, tuple);
    switch (n.predicate) {
      case Predicate::kIn:
        return std::binary_search(n.values.begin(), n.values.end(), l);
      case Predicate::kNotIn:
        return !std::binary_search(n.values.begin(), n.values.end(), l);
      case Predicate::kEq: return l == EvalTerm(n.rhs, tuple);
      case Predicate::kNe: return l != EvalTerm(n.rhs, tuple);
      default: break;
    }
    const Rational& a = AsNumeric(l);
    const Value r = EvalTerm(n.rhs, tuple);
    const Rational& b = AsNumeric(r);
    switch (n.predicate) {
      case Predicate::kLe: return a <= b;
      case Predicate::kLt: return a < b;
      case Predicate::kGe: return a >= b;
      case Predicate::kGt: return a > b;
      default: return false;
    }
  }

  std::vector<CTerm> terms_;
  std::vector<CNode> nodes_;
  int root_ = -1;
};

}  // namespace rasens

#endif  // RASENS_CONSTRAINT_HPP_
