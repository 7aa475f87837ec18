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

// Recursive-descent parsers for the schema, constraint and query languages.
//
// Schema files:
//   relation Items {
//     Item: string in {"Oil", "Salt"};
//     Price: int [0, 1000];
//     Cost: int [0, 1000]
//   } check { Cost <= Price and 0 < Cost }
//
// Queries (one per file, binary operators left-associative):
//   avg(Weight) of select Weight <= Height - 100 from R
//   count of (A union B) product1 row(Tag = "x")

#ifndef RASENS_SYNTAX_HPP_
#define RASENS_SYNTAX_HPP_

#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rasens/constraint.hpp"
#include "rasens/error.hpp"
#include "rasens/query.hpp"
#include "rasens/rational.hpp"

namespace rasens {

struct Token {
  enum class Kind { kIdent, kNumber, kString, kSymbol, kEnd };
  Kind kind = Kind::kEnd;
  std::string text;  // identifier, symbol, or decoded string body
  Rational number = 0;
  int line = 1;
  int column = 1;
};

// Words that can never name a relation or attribute.
inline bool IsReservedWord(std::string_view w) {
  static const std::set<std::string, std::less<>> kReserved = {
      "and",     "or",       "not",       "iff",        "in",      "true",  "false",
      "from",    "of",       "union",     "intersect",  "minus",   "product",
      "product1", "productN", "productagg", "select",    "project", "group", "agg",
      "row",     "values",   "relation",  "check",      "inf"};
  return kReserved.count(w) > 0;
}

inline std::vector<Token> Tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto is_digit = [&](size_t k) {
    return k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]));
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      t.kind = Token::Kind::kIdent;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (is_digit(i)) {
      size_t j = i;
      while (is_digit(j)) ++j;
      bool fraction = false;
      if (j < src.size() && src[j] == '.' && is_digit(j + 1)) {
        ++j;
        while (is_digit(j)) ++j;
        fraction = true;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (is_digit(k)) {
          j = k;
          while (is_digit(j)) ++j;
          fraction = true;
        }
      }
      if (!fraction && j < src.size() && src[j] == '/' && is_digit(j + 1)) {
        ++j;
        while (is_digit(j)) ++j;
      }
      t.kind = Token::Kind::kNumber;
      t.text = std::string(src.substr(i, j - i));
      auto value = ParseRational(t.text);
      if (!value) throw SyntaxError("malformed number '" + t.text + "'", line, col);
      t.number = *value;
      advance(j - i);
    } else if (c == '"') {
      advance(1);
      std::string body;
      while (true) {
        if (i >= src.size() || src[i] == '\n') {
          throw SyntaxError("unterminated string", t.line, t.column);
        }
        if (src[i] == '"') break;
        if (src[i] == '\\' && i + 1 < src.size()) advance(1);
        body += src[i];
        advance(1);
      }
      advance(1);
      t.kind = Token::Kind::kString;
      t.text = std::move(body);
    } else {
      static const char* kTwoChar[] = {"<=", ">=", "!="};
      t.kind = Token::Kind::kSymbol;
      for (const char* s : kTwoChar) {
        if (src.substr(i, 2) == s) t.text = s;
      }
      if (t.text.empty()) {
        if (std::string_view("<>=+-*(){}[],;:").find(c) == std::string_view::npos) {
          throw SyntaxError(std::string("unexpected character '") + c + "'", line, col);
        }
        t.text = std::string(1, c);
      }
      advance(t.text.size());
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

namespace internal {

class Parser {
 public:
  explicit Parser(std::string_view src) : tokens_(Tokenize(src)) {}

  // ---- Token helpers ------------------------------------------------------

  const Token& Peek(size_t k = 0) const {
    return tokens_[std::min(pos_ + k, tokens_.size() - 1)];
  }
  bool AtEnd() const { return Peek().kind == Token::Kind::kEnd; }
  bool IsSymbol(std::string_view s, size_t k = 0) const {
    return Peek(k).kind == Token::Kind::kSymbol && Peek(k).text == s;
  }
  bool IsWord(std::string_view w, size_t k = 0) const {
    return Peek(k).kind == Token::Kind::kIdent && Peek(k).text == w;
  }
  [[noreturn]] void Fail(const std::string& msg) const {
    const Token& t = Peek();
    std::string found = t.kind == Token::Kind::kEnd ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(msg + ", found " + found, t.line, t.column);
  }
  void ExpectSymbol(std::string_view s) {
    if (!IsSymbol(s)) Fail("expected '" + std::string(s) + "'");
    ++pos_;
  }
  void ExpectWord(std::string_view w) {
    if (!IsWord(w)) Fail("expected '" + std::string(w) + "'");
    ++pos_;
  }
  bool AcceptSymbol(std::string_view s) {
    if (!IsSymbol(s)) return false;
    ++pos_;
    return true;
  }
  bool AcceptWord(std::string_view w) {
    if (!IsWord(w)) return false;
    ++pos_;
    return true;
  }
  std::string ExpectName(const char* what) {
    if (Peek().kind != Token::Kind::kIdent || IsReservedWord(Peek().text)) {
      Fail(std::string("expected ") + what);
    }
    return tokens_[pos_++].text;
  }
  void ExpectEnd() {
    if (!AtEnd()) Fail("expected end of input");
  }

  // ---- Terms and constraints ---------------------------------------------

  Constraint ParseConstraint() { return ParseIff(); }

  Term ParseTerm() {
    Term t = ParseProductTerm();
    while (IsSymbol("+") || IsSymbol("-")) {
      const bool add = Peek().text == "+";
      ++pos_;
      Term rhs = ParseProductTerm();
      t = add ? Term::Add(t, rhs) : Term::Sub(t, rhs);
    }
    return t;
  }

  Rational ParseSignedNumber() {
    const bool negative = AcceptSymbol("-");
    if (Peek().kind != Token::Kind::kNumber) Fail("expected a number");
    Rational v = tokens_[pos_++].number;
    return negative ? Rational(-v) : v;
  }

  Value ParseValue() {
    if (Peek().kind == Token::Kind::kString) return tokens_[pos_++].text;
    return ParseSignedNumber();
  }

  std::vector<Value> ParseValueSet() {
    ExpectSymbol("{");
    std::vector<Value> out;
    if (!IsSymbol("}")) {
      do {
        out.push_back(ParseValue());
      } while (AcceptSymbol(","));
    }
    ExpectSymbol("}");
    return out;
  }

  // ---- Schemas -------------------------------------------------------------

  ExtRational ParseBound() {
    const bool negative = AcceptSymbol("-");
    if (AcceptWord("inf")) return negative ? ExtRational::NegInf() : ExtRational::PosInf();
    if (Peek().kind != Token::Kind::kNumber) Fail("expected a number or 'inf'");
    Rational v = tokens_[pos_++].number;
    return ExtRational(negative ? Rational(-v) : v);
  }

  Domain ParseDomain() {
    const Token start = Peek();
    auto wrap = [&](auto&& make) -> Domain {
      try {
        return make();
      } catch (const SyntaxError&) {
        throw;
      } catch (const std::exception& e) {
        throw SyntaxError(std::string("invalid domain: ") + e.what(), start.line, start.column);
      }
    };
    if (AcceptWord("string")) {
      ExpectWord("in");
      auto vs = ParseValueSet();
      std::vector<std::string> ss;
      for (const auto& v : vs) {
        if (IsNumber(v)) throw SyntaxError("string domain lists a number", start.line, start.column);
        ss.push_back(AsString(v));
      }
      return wrap([&] { return Domain::StringSet(ss); });
    }
    std::string type;
    for (const char* w : {"int", "real", "num"}) {
      if (IsWord(w)) type = w;
    }
    if (type.empty()) Fail("expected a domain ('int', 'real', 'num' or 'string')");
    ++pos_;
    if (AcceptWord("in")) {
      auto vs = ParseValueSet();
      std::vector<Rational> ns;
      for (const auto& v : vs) {
        if (!IsNumber(v)) throw SyntaxError("numeric domain lists a string", start.line, start.column);
        if (type == "int" && !IsInteger(AsNumber(v))) {
          throw SyntaxError("int domain lists a non-integer", start.line, start.column);
        }
        ns.push_back(AsNumber(v));
      }
      return wrap([&] { return Domain::NumberSet(ns); });
    }
    if (type == "num") Fail("expected 'in' after 'num'");
    bool lo_open = false;
    if (AcceptSymbol("(")) {
      lo_open = true;
    } else {
      ExpectSymbol("[");
    }
    ExtRational lo = ParseBound();
    ExpectSymbol(",");
    ExtRational hi = ParseBound();
    bool hi_open = false;
    if (AcceptSymbol(")")) {
      hi_open = true;
    } else {
      ExpectSymbol("]");
    }
    if (type == "int") {
      if ((lo.is_finite() && lo_open) || (hi.is_finite() && hi_open)) {
        throw SyntaxError("int intervals take closed finite endpoints", start.line, start.column);
      }
      return wrap([&] { return Domain::IntInterval(lo, hi); });
    }
    return wrap([&] { return Domain::RealInterval(lo, hi, lo_open, hi_open); });
  }

  ConstrainedSchema ParseRelation() {
    ExpectWord("relation");
    ConstrainedSchema s;
    s.name = ExpectName("a relation name");
    s.constraint = Constraint::True();
    ExpectSymbol("{");
    std::set<std::string> seen;
    while (!IsSymbol("}")) {
      const Token at = Peek();
      std::string name = ExpectName("an attribute name");
      if (!seen.insert(name).second) {
        throw SyntaxError("duplicate attribute '" + name + "'", at.line, at.column);
      }
      ExpectSymbol(":");
      s.attributes.push_back(Attribute{name, ParseDomain()});
      if (!AcceptSymbol(";")) break;
    }
    ExpectSymbol("}");
    if (s.attributes.empty()) Fail("relation '" + s.name + "' declares no attributes");
    if (AcceptWord("check")) {
      ExpectSymbol("{");
      const Token at = Peek();
      s.constraint = ParseConstraint();
      ExpectSymbol("}");
      try {
        ValidateSchema(s);
      } catch (const Error& e) {
        throw SyntaxError(e.what(), at.line, at.column);
      }
    }
    return s;
  }

  std::vector<ConstrainedSchema> ParseSchemaFile() {
    std::vector<ConstrainedSchema> out;
    while (!AtEnd()) out.push_back(ParseRelation());
    return out;
  }

  // ---- Queries -------------------------------------------------------------

  AggFn ParseAggFn() {
    if (Peek().kind != Token::Kind::kIdent) Fail("expected an aggregation function");
    auto kind = ParseAggKind(Peek().text);
    if (!kind) Fail("expected an aggregation function (count, sum, max, min, avg)");
    ++pos_;
    if (*kind == AggKind::kCount) return AggFn::Count();
    ExpectSymbol("(");
    std::string attr = ExpectName("an attribute name");
    ExpectSymbol(")");
    return AggFn{*kind, attr};
  }

  std::vector<std::string> ParseNameList() {
    std::vector<std::string> out{ExpectName("an attribute name")};
    while (AcceptSymbol(",")) out.push_back(ExpectName("an attribute name"));
    return out;
  }

  Plan ParsePlan() {
    Plan left = ParseUnaryPlan();
    while (true) {
      if (AcceptWord("union")) {
        left = Plan::Union(left, ParseUnaryPlan());
      } else if (AcceptWord("intersect")) {
        left = Plan::Intersection(left, ParseUnaryPlan());
      } else if (AcceptWord("minus")) {
        left = Plan::Difference(left, ParseUnaryPlan());
      } else if (AcceptWord("product")) {
        left = Plan::Product(left, ParseUnaryPlan());
      } else if (AcceptWord("product1")) {
        left = Plan::ProductOne(left, ParseUnaryPlan());
      } else if (AcceptWord("productN")) {
        const Token at = Peek();
        if (at.kind != Token::Kind::kNumber || !IsInteger(at.number) || at.number < 1) {
          Fail("expected a positive integer after 'productN'");
        }
        ++pos_;
        const uint64_t n = boost::multiprecision::numerator(at.number).convert_to<uint64_t>();
        left = Plan::ProductN(n, left, ParseUnaryPlan());
      } else if (AcceptWord("productagg")) {
        AggFn fn = ParseAggFn();
        left = Plan::ProductAgg(fn, left, ParseUnaryPlan());
      } else {
        return left;
      }
    }
  }

  TopQuery ParseTopQuery() {
    AggFn fn = ParseAggFn();
    ExpectWord("of");
    Plan body = ParsePlan();
    return TopQuery{fn, body};
  }

 private:
  Term ParseProductTerm() {
    Term t = ParseUnaryTerm();
    while (AcceptSymbol("*")) t = Term::Mul(t, ParseUnaryTerm());
    return t;
  }

  Term ParseUnaryTerm() {
    if (AcceptSymbol("-")) {
      if (Peek().kind == Token::Kind::kNumber) {
        return Term::Number(Rational(-tokens_[pos_++].number));
      }
      return Term::Neg(ParseUnaryTerm());
    }
    const Token& t = Peek();
    switch (t.kind) {
      case Token::Kind::kNumber: ++pos_; return Term::Number(t.number);
      case Token::Kind::kString: ++pos_; return Term::String(t.text);
      case Token::Kind::kIdent:
        if (IsReservedWord(t.text)) Fail("expected a term");
        ++pos_;
        return Term::Attribute(t.text);
      default:
        break;
    }
    if (AcceptSymbol("(")) {
      Term inner = ParseTerm();
      ExpectSymbol(")");
      return inner;
    }
    Fail("expected a term");
  }

  Constraint ParseIff() {
    Constraint c = ParseOr();
    while (AcceptWord("iff")) c = Constraint::Iff(c, ParseOr());
    return c;
  }

  Constraint ParseOr() {
    std::vector<Constraint> parts{ParseAnd()};
    while (AcceptWord("or")) parts.push_back(ParseAnd());
    return parts.size() == 1 ? parts[0] : Constraint::Or(parts);
  }

  Constraint ParseAnd() {
    std::vector<Constraint> parts{ParseNot()};
    while (AcceptWord("and")) parts.push_back(ParseNot());
    return parts.size() == 1 ? parts[0] : Constraint::And(parts);
  }

  Constraint ParseNot() {
    if (AcceptWord("not")) return Constraint::Not(ParseNot());
    return ParsePrimaryConstraint();
  }

  Constraint ParsePrimaryConstraint() {
    if (AcceptWord("true")) return Constraint::True();
    if (AcceptWord("false")) return Constraint::False();
    if (!IsSymbol("(")) return ParseComparison();
    // '(' opens either a parenthesized term or a parenthesized constraint.
    const size_t start = pos_;
    try {
      return ParseComparison();
    } catch (const SyntaxError& as_term) {
      const size_t term_pos = pos_;
      pos_ = start;
      try {
        ExpectSymbol("(");
        Constraint inner = ParseConstraint();
        ExpectSymbol(")");
        return inner;
      } catch (const SyntaxError& as_constraint) {
        if (term_pos > pos_) throw as_term;
        throw;
      }
    }
  }

  static std::optional<Predicate> RelOp(const Token& t) {
    if (t.kind != Token::Kind::kSymbol) return std::nullopt;
    if (t.text == "<=") return Predicate::kLe;
    if (t.text == "<") return Predicate::kLt;
    if (t.text == ">=") return Predicate::kGe;
    if (t.text == ">") return Predicate::kGt;
    if (t.text == "=") return Predicate::kEq;
    if (t.text == "!=") return Predicate::kNe;
    return std::nullopt;
  }

  Constraint Checked(const Token& at, const std::function<Constraint()>& make) {
    try {
      return make();
    } catch (const SyntaxError&) {
      throw;
    } catch (const Error& e) {
      throw SyntaxError(e.what(), at.line, at.column);
    }
  }

  // term (relop term)+ | term [not] in {values}; chains expand to conjunctions.
  Constraint ParseComparison() {
    const Token at = Peek();
    Term lhs = ParseTerm();
    if (IsWord("in") || (IsWord("not") && IsWord("in", 1))) {
      const bool negated = AcceptWord("not");
      ExpectWord("in");
      auto values = ParseValueSet();
      return Checked(at, [&] { return Constraint::Member(lhs, values, negated); });
    }
    auto op = RelOp(Peek());
    if (!op) Fail("expected a comparison operator");
    std::vector<Constraint> links;
    while (op) {
      ++pos_;
      Term rhs = ParseTerm();
      links.push_back(Checked(at, [&] { return Constraint::Compare(*op, lhs, rhs); }));
      lhs = rhs;
      op = RelOp(Peek());
    }
    return links.size() == 1 ? links[0] : Constraint::And(links);
  }

  Plan ParseUnaryPlan() {
    if (AcceptWord("select")) {
      Constraint pred = ParseConstraint();
      ExpectWord("from");
      return Plan::Restriction(pred, ParseUnaryPlan());
    }
    if (AcceptWord("project")) {
      auto attrs = ParseNameList();
      ExpectWord("from");
      return Plan::Projection(attrs, ParseUnaryPlan());
    }
    if (AcceptWord("group")) {
      std::vector<std::string> group;
      if (!IsWord("agg")) group = ParseNameList();
      ExpectWord("agg");
      std::vector<AggFn> fns{ParseAggFn()};
      while (AcceptSymbol(",")) fns.push_back(ParseAggFn());
      ExpectWord("from");
      return Plan::GroupAggregate(group, fns, ParseUnaryPlan());
    }
    if (AcceptSymbol("(")) {
      Plan inner = ParsePlan();
      ExpectSymbol(")");
      return inner;
    }
    if (AcceptWord("row")) {
      ExpectSymbol("(");
      std::vector<std::string> attrs;
      Tuple row;
      do {
        attrs.push_back(ExpectName("an attribute name"));
        ExpectSymbol("=");
        row.push_back(ParseValue());
      } while (AcceptSymbol(","));
      ExpectSymbol(")");
      return Plan::Literal(attrs, {row});
    }
    if (AcceptWord("values")) {
      ExpectSymbol("(");
      auto attrs = ParseNameList();
      ExpectSymbol(")");
      ExpectSymbol("{");
      std::vector<Tuple> rows;
      do {
        const Token at = Peek();
        ExpectSymbol("(");
        Tuple row{ParseValue()};
        while (AcceptSymbol(",")) row.push_back(ParseValue());
        ExpectSymbol(")");
        if (row.size() != attrs.size()) {
          throw SyntaxError("row has " + std::to_string(row.size()) + " values, expected " +
                                std::to_string(attrs.size()),
                            at.line, at.column);
        }
        rows.push_back(std::move(row));
      } while (AcceptSymbol(","));
      ExpectSymbol("}");
      return Plan::Literal(attrs, rows);
    }
    return Plan::Id(ExpectName("a relation name or '('"));
  }

  std::vector<Token> tokens_;
  size_t pos_ = 0;
};

}  // namespace internal

inline Constraint ParseConstraint(std::string_view text) {
  internal::Parser p(text);
  Constraint c = p.ParseConstraint();
  p.ExpectEnd();
  return c;
}

inline Term ParseTerm(std::string_view text) {
  internal::Parser p(text);
  Term t = p.ParseTerm();
  p.ExpectEnd();
  return t;
}

inline std::vector<ConstrainedSchema> ParseSchemas(std::string_view text) {
  internal::Parser p(text);
  return p.ParseSchemaFile();
}

inline Plan ParsePlan(std::string_view text) {
  internal::Parser p(text);
  Plan plan = p.ParsePlan();
  p.ExpectEnd();
  return plan;
}

// Parses without resolving names; see Annotate for validation.
inline TopQuery ParseQuery(std::string_view text) {
  internal::Parser p(text);
  TopQuery q = p.ParseTopQuery();
  p.ExpectEnd();
  return q;
}

// Schema declaration text that ParseSchemas reads back.
inline std::string ToString(const ConstrainedSchema& s) {
  std::string out = "relation " + s.name + " {";
  for (size_t i = 0; i < s.attributes.size(); ++i) {
    out += (i ? "; " : " ") + s.attributes[i].name + ": " + s.attributes[i].domain.ToString();
  }
  out += " }";
  if (s.constraint.kind() != Constraint::Kind::kTrue) {
    out += " check { " + ToString(s.constraint) + " }";
  }
  return out;
}

}  // namespace rasens

#endif  // RASENS_SYNTAX_HPP_
