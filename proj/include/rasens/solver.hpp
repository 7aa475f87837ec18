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

// Bounds, satisfiability and solution counting for constraints over a
// constrained schema.
//
// Two engines cooperate:
//  * hull-consistency narrowing of linear atoms over a box of attribute
//    ranges, applied per branch of the disjunctive normal form (or
//    recursively over the NNF when the DNF would exceed the branch cap);
//  * capped enumeration over the finite candidate sets left in the box,
//    which makes results exact whenever every relevant attribute ends up
//    with a finite candidate set.
// Narrowing is sound: a value removed from a range belongs to no solution.

#ifndef RASENS_SOLVER_HPP_
#define RASENS_SOLVER_HPP_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rasens/constraint.hpp"
#include "rasens/rational.hpp"
#include "rasens/sensitivity_value.hpp"

namespace rasens {

struct SolverOptions {
  uint64_t enum_cap = 1'000'000;  // max enumerated assignments / counted tuples
  size_t dnf_cap = 64;            // max DNF branches before the recursive fallback
  int max_rounds = 64;            // narrowing rounds per fixpoint
  int witness_budget = 2000;      // search nodes per witness search
};

// [lower, upper] with open/closed endpoints; `empty` marks an unsatisfiable
// constraint.
struct Bounds {
  ExtRational lower = ExtRational::NegInf();
  ExtRational upper = ExtRational::PosInf();
  bool lower_open = true;
  bool upper_open = true;
  bool empty = false;

  static Bounds Empty() {
    Bounds b;
    b.empty = true;
    return b;
  }
  static Bounds Closed(Rational lo, Rational hi) {
    return Bounds{ExtRational(std::move(lo)), ExtRational(std::move(hi)), false, false, false};
  }

  bool is_bounded() const { return !empty && lower.is_finite() && upper.is_finite(); }

  bool Contains(const Rational& x) const {
    if (empty) return false;
    const ExtRational v(x);
    if (lower_open ? !(lower < v) : v < lower) return false;
    if (upper_open ? !(v < upper) : upper < v) return false;
    return true;
  }

  // Interval containment (this subset of other).
  bool SubsetOf(const Bounds& other) const {
    if (empty) return true;
    if (other.empty) return false;
    const bool lo_ok = other.lower < lower ||
                       (other.lower == lower && (!other.lower_open || lower_open));
    const bool hi_ok = upper < other.upper ||
                       (other.upper == upper && (!other.upper_open || upper_open));
    return lo_ok && hi_ok;
  }

  std::string ToString() const {
    if (empty) return "empty";
    return std::string(lower_open ? "(" : "[") + lower.ToString() + ", " +
           upper.ToString() + (upper_open ? ")" : "]");
  }

  friend bool operator==(const Bounds& a, const Bounds& b) {
    if (a.empty || b.empty) return a.empty == b.empty;
    return a.lower == b.lower && a.upper == b.upper && a.lower_open == b.lower_open &&
           a.upper_open == b.upper_open;
  }
};

enum class Satisfiability { kYes, kNo, kUnknown };

struct SolutionCount {
  enum class Kind { kFinite, kExceedsCap, kInfinite };
  Kind kind = Kind::kFinite;
  uint64_t count = 0;

  friend bool operator==(const SolutionCount&, const SolutionCount&) = default;
};

namespace internal {

struct Range {
  bool numeric = true;
  bool integral = false;
  ExtRational lo = ExtRational::NegInf();
  ExtRational hi = ExtRational::PosInf();
  bool lo_open = true;
  bool hi_open = true;
  std::optional<std::vector<Rational>> numbers;  // finite candidate set, sorted
  std::vector<std::string> strings;              // string attributes only

  bool IsEmpty() const {
    if (!numeric) return strings.empty();
    if (numbers) return numbers->empty();
    if (hi < lo) return true;
    return lo == hi && (lo_open || hi_open || !lo.is_finite());
  }

  bool IsPoint() const {
    if (!numeric) return strings.size() == 1;
    if (numbers) return numbers->size() == 1;
    return lo.is_finite() && lo == hi && !lo_open && !hi_open;
  }

  bool ContainsNumber(const Rational& x) const {
    if (numbers) return std::binary_search(numbers->begin(), numbers->end(), x);
    if (integral && !IsInteger(x)) return false;
    const ExtRational v(x);
    if (lo_open ? !(lo < v) : v < lo) return false;
    if (hi_open ? !(v < hi) : hi < v) return false;
    return true;
  }

  friend bool operator==(const Range& a, const Range& b) {
    return a.numeric == b.numeric && a.lo == b.lo && a.hi == b.hi && a.lo_open == b.lo_open &&
           a.hi_open == b.hi_open && a.numbers == b.numbers && a.strings == b.strings;
  }
};

// Re-establishes the range invariants after a narrowing step: candidate sets
// are filtered by the interval and define its hull, integer endpoints are
// closed and integral.
inline void Tighten(Range& r) {
  if (!r.numeric) return;
  if (r.numbers) {
    std::vector<Rational> kept;
    for (const auto& x : *r.numbers) {
      const ExtRational v(x);
      if (r.lo_open ? !(r.lo < v) : v < r.lo) continue;
      if (r.hi_open ? !(v < r.hi) : r.hi < v) continue;
      kept.push_back(x);
    }
    r.numbers = std::move(kept);
    if (!r.numbers->empty()) {
      r.lo = r.numbers->front();
      r.hi = r.numbers->back();
      r.lo_open = r.hi_open = false;
    }
    return;
  }
  if (r.integral) {
    if (r.lo.is_finite()) {
      Integer c = Ceil(r.lo.value());
      if (r.lo_open && Rational(c) == r.lo.value()) ++c;
      r.lo = Rational(c);
      r.lo_open = false;
    }
    if (r.hi.is_finite()) {
      Integer f = Floor(r.hi.value());
      if (r.hi_open && Rational(f) == r.hi.value()) --f;
      r.hi = Rational(f);
      r.hi_open = false;
    }
  }
}

inline Range RangeFromDomain(const Domain& d) {
  Range r;
  switch (d.kind()) {
    case Domain::Kind::kStringSet:
      r.numeric = false;
      r.strings = d.strings();
      break;
    case Domain::Kind::kNumberSet:
      r.numbers = d.numbers();
      r.lo = d.lower();
      r.hi = d.upper();
      r.lo_open = r.hi_open = false;
      break;
    case Domain::Kind::kIntInterval:
      r.integral = true;
      [[fallthrough]];
    case Domain::Kind::kRealInterval:
      r.lo = d.lower();
      r.hi = d.upper();
      r.lo_open = d.lower_open() || !d.lower().is_finite();
      r.hi_open = d.upper_open() || !d.upper().is_finite();
      break;
  }
  return r;
}

// Tightens the upper endpoint to `v` (open if `open`). Returns true on change.
inline bool NarrowUpper(Range& r, const ExtRational& v, bool open) {
  if (v < r.hi || (v == r.hi && open && !r.hi_open)) {
    r.hi = v;
    r.hi_open = open || !v.is_finite();
    Tighten(r);
    return true;
  }
  return false;
}

inline bool NarrowLower(Range& r, const ExtRational& v, bool open) {
  if (r.lo < v || (v == r.lo && open && !r.lo_open)) {
    r.lo = v;
    r.lo_open = open || !v.is_finite();
    Tighten(r);
    return true;
  }
  return false;
}

// Keeps only numbers in `allowed` (sorted).
inline bool RestrictNumbers(Range& r, const std::vector<Rational>& allowed) {
  std::vector<Rational> kept;
  if (r.numbers) {
    std::set_intersection(r.numbers->begin(), r.numbers->end(), allowed.begin(), allowed.end(),
                          std::back_inserter(kept));
    if (kept.size() == r.numbers->size()) return false;
  } else {
    for (const auto& x : allowed) {
      if (r.ContainsNumber(x)) kept.push_back(x);
    }
  }
  r.numbers = std::move(kept);
  Tighten(r);
  return true;
}

inline bool ExcludeNumber(Range& r, const Rational& x) {
  if (r.numbers) {
    auto it = std::lower_bound(r.numbers->begin(), r.numbers->end(), x);
    if (it == r.numbers->end() || *it != x) return false;
    r.numbers->erase(it);
    Tighten(r);
    return true;
  }
  if (r.lo.is_finite() && r.lo.value() == x && !r.lo_open) {
    r.lo_open = true;
    Tighten(r);
    return true;
  }
  if (r.hi.is_finite() && r.hi.value() == x && !r.hi_open) {
    r.hi_open = true;
    Tighten(r);
    return true;
  }
  return false;
}

struct Box {
  std::vector<Range> ranges;
  bool empty = false;

  friend bool operator==(const Box& a, const Box& b) {
    return a.empty == b.empty && (a.empty || a.ranges == b.ranges);
  }
};

inline void Join(Range& into, const Range& other) {
  if (!into.numeric) {
    std::vector<std::string> all;
    std::set_union(into.strings.begin(), into.strings.end(), other.strings.begin(),
                   other.strings.end(), std::back_inserter(all));
    into.strings = std::move(all);
    return;
  }
  if (other.lo < into.lo || (other.lo == into.lo && !other.lo_open)) {
    into.lo_open = other.lo == into.lo ? (into.lo_open && other.lo_open) : other.lo_open;
    into.lo = other.lo;
  }
  if (into.hi < other.hi || (other.hi == into.hi && !other.hi_open)) {
    into.hi_open = other.hi == into.hi ? (into.hi_open && other.hi_open) : other.hi_open;
    into.hi = other.hi;
  }
  if (into.numbers && other.numbers) {
    std::vector<Rational> all;
    std::set_union(into.numbers->begin(), into.numbers->end(), other.numbers->begin(),
                   other.numbers->end(), std::back_inserter(all));
    into.numbers = std::move(all);
  } else {
    into.numbers.reset();
  }
}

inline Box JoinBoxes(const std::vector<Box>& boxes) {
  Box out;
  out.empty = true;
  for (const auto& b : boxes) {
    if (b.empty) continue;
    if (out.empty) {
      out = b;
      continue;
    }
    for (size_t i = 0; i < out.ranges.size(); ++i) Join(out.ranges[i], b.ranges[i]);
  }
  return out;
}

// Attribute slots of a schema: visible attributes first, then hidden ones.
struct SlotMap {
  std::vector<std::string> names;
  std::vector<const Domain*> domains;

  explicit SlotMap(const ConstrainedSchema& s) {
    for (const auto& a : s.attributes) {
      names.push_back(a.name);
      domains.push_back(&a.domain);
    }
    for (const auto& a : s.hidden) {
      names.push_back(a.name);
      domains.push_back(&a.domain);
    }
  }

  int Slot(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
      throw Error(ErrorKind::kValidation, "unknown attribute '" + name + "'");
    }
    return static_cast<int>(it - names.begin());
  }

  Box InitialBox() const {
    Box b;
    for (const Domain* d : domains) b.ranges.push_back(RangeFromDomain(*d));
    return b;
  }
};

// sum_i coeffs[slot_i] * x_i + constant.
struct LinearForm {
  std::map<int, Rational> coeffs;
  Rational constant = 0;

  void AddScaled(const LinearForm& o, const Rational& k) {
    for (const auto& [slot, c] : o.coeffs) {
      Rational& mine = coeffs[slot];
      mine += c * k;
      if (mine == 0) coeffs.erase(slot);
    }
    constant += o.constant * k;
  }
};

// Attributes whose range is a single number are folded into constants, so
// atoms become linear once enough of their attributes are fixed.
inline std::optional<LinearForm> Linearize(const Term& t, const SlotMap& slots, const Box& box) {
  LinearForm f;
  switch (t.kind()) {
    case Term::Kind::kAttribute: {
      const int slot = slots.Slot(t.text());
      const Range& r = box.ranges[slot];
      if (r.numeric && r.IsPoint()) {
        f.constant = r.numbers ? r.numbers->front() : r.lo.value();
      } else {
        f.coeffs[slot] = 1;
      }
      return f;
    }
    case Term::Kind::kNumber: f.constant = t.number(); return f;
    case Term::Kind::kString: return std::nullopt;
    case Term::Kind::kNeg: {
      auto a = Linearize(t.lhs(), slots, box);
      if (!a) return std::nullopt;
      f.AddScaled(*a, -1);
      return f;
    }
    case Term::Kind::kAdd:
    case Term::Kind::kSub: {
      auto a = Linearize(t.lhs(), slots, box);
      auto b = Linearize(t.rhs(), slots, box);
      if (!a || !b) return std::nullopt;
      f.AddScaled(*a, 1);
      f.AddScaled(*b, t.kind() == Term::Kind::kAdd ? 1 : -1);
      return f;
    }
    case Term::Kind::kMul: {
      auto a = Linearize(t.lhs(), slots, box);
      auto b = Linearize(t.rhs(), slots, box);
      if (!a || !b) return std::nullopt;
      if (a->coeffs.empty()) {
        f.AddScaled(*b, a->constant);
        return f;
      }
      if (b->coeffs.empty()) {
        f.AddScaled(*a, b->constant);
        return f;
      }
      return std::nullopt;  // nonlinear: no narrowing
    }
  }
  return std::nullopt;
}

struct Endpoint {
  ExtRational value;
  bool open;
};

// Lower endpoint of c * x for x in r.
inline Endpoint MinOf(const Range& r, const Rational& c) {
  if (c > 0) return {r.lo.Scale(c), r.lo_open};
  return {r.hi.Scale(c), r.hi_open};
}

// Narrows every variable of `form <= 0` (strict: `< 0`).
inline bool ReviseLe(const LinearForm& form, bool strict, Box& box) {
  if (form.coeffs.empty()) {
    const bool ok = strict ? form.constant < 0 : form.constant <= 0;
    if (!ok) box.empty = true;
    return !ok;
  }
  std::vector<std::pair<int, Rational>> terms(form.coeffs.begin(), form.coeffs.end());
  std::vector<Endpoint> mins;
  for (const auto& [slot, c] : terms) mins.push_back(MinOf(box.ranges[slot], c));
  bool changed = false;
  for (size_t j = 0; j < terms.size(); ++j) {
    // c_j x_j <= -constant - sum_{i != j} min_i
    ExtRational rest(Rational(-form.constant));
    bool open = strict;
    bool unbounded = false;
    for (size_t i = 0; i < terms.size(); ++i) {
      if (i == j) continue;
      if (!mins[i].value.is_finite()) {
        unbounded = true;
        break;
      }
      rest = rest + ExtRational(Rational(-mins[i].value.value()));
      open = open || mins[i].open;
    }
    if (unbounded) continue;
    const Rational& c = terms[j].second;
    Range& r = box.ranges[terms[j].first];
    const ExtRational bound(Rational(rest.value() / c));
    changed |= c > 0 ? NarrowUpper(r, bound, open) : NarrowLower(r, bound, open);
    if (r.IsEmpty()) {
      box.empty = true;
      return true;
    }
    mins[j] = MinOf(r, c);
  }
  return changed;
}

inline std::optional<int> SingleSlot(const LinearForm& f) {
  if (f.coeffs.size() != 1) return std::nullopt;
  return f.coeffs.begin()->first;
}

inline bool IsStringTerm(const Term& t, const SlotMap& slots, const Box& box) {
  if (t.kind() == Term::Kind::kString) return true;
  if (t.kind() == Term::Kind::kAttribute) return !box.ranges[slots.Slot(t.text())].numeric;
  return false;
}

inline bool ReviseStringAtom(const Constraint& atom, const SlotMap& slots, Box& box) {
  auto strings_of = [&](const Term& t) -> std::vector<std::string> {
    if (t.kind() == Term::Kind::kString) return {t.text()};
    return box.ranges[slots.Slot(t.text())].strings;
  };
  auto restrict = [&](const Term& t, const std::vector<std::string>& allowed, bool exclude) {
    if (t.kind() != Term::Kind::kAttribute) return false;
    Range& r = box.ranges[slots.Slot(t.text())];
    std::vector<std::string> kept;
    if (exclude) {
      std::set_difference(r.strings.begin(), r.strings.end(), allowed.begin(), allowed.end(),
                          std::back_inserter(kept));
    } else {
      std::set_intersection(r.strings.begin(), r.strings.end(), allowed.begin(), allowed.end(),
                            std::back_inserter(kept));
    }
    if (kept.size() == r.strings.size()) return false;
    r.strings = std::move(kept);
    if (r.strings.empty()) box.empty = true;
    return true;
  };
  const Term& lhs = atom.lhs();
  switch (atom.predicate()) {
    case Predicate::kIn:
    case Predicate::kNotIn: {
      std::vector<std::string> vs;
      for (const auto& v : atom.values()) vs.push_back(AsString(v));
      if (lhs.kind() == Term::Kind::kString) {
        const bool in = std::binary_search(vs.begin(), vs.end(), lhs.text());
        if (in != (atom.predicate() == Predicate::kIn)) box.empty = true;
        return box.empty;
      }
      return restrict(lhs, vs, atom.predicate() == Predicate::kNotIn);
    }
    case Predicate::kEq: {
      const auto ls = strings_of(lhs);
      const auto rs = strings_of(atom.rhs());
      bool changed = restrict(lhs, rs, false);
      changed |= restrict(atom.rhs(), ls, false);
      if (lhs.kind() == Term::Kind::kString && atom.rhs().kind() == Term::Kind::kString &&
          lhs.text() != atom.rhs().text()) {
        box.empty = true;
      }
      return changed || box.empty;
    }
    case Predicate::kNe: {
      const auto ls = strings_of(lhs);
      const auto rs = strings_of(atom.rhs());
      bool changed = false;
      if (rs.size() == 1) changed |= restrict(lhs, rs, true);
      if (ls.size() == 1) changed |= restrict(atom.rhs(), ls, true);
      if (ls.size() == 1 && rs.size() == 1 && ls == rs) box.empty = true;
      return changed || box.empty;
    }
    default: return false;
  }
}

// One narrowing step for an atom. Returns true if the box changed.
inline bool Revise(const Constraint& atom, const SlotMap& slots, Box& box) {
  if (box.empty) return false;
  const Term& lhs = atom.lhs();
  const Predicate p = atom.predicate();
  const bool set_atom = p == Predicate::kIn || p == Predicate::kNotIn;
  if (IsStringTerm(lhs, slots, box) || (!set_atom && IsStringTerm(atom.rhs(), slots, box))) {
    return ReviseStringAtom(atom, slots, box);
  }
  if (set_atom) {
    auto f = Linearize(lhs, slots, box);
    if (!f) return false;
    std::vector<Rational> vs;
    for (const auto& v : atom.values()) vs.push_back(AsNumber(v));
    if (f->coeffs.empty()) {
      const bool in = std::binary_search(vs.begin(), vs.end(), f->constant);
      if (in != (p == Predicate::kIn)) box.empty = true;
      return box.empty;
    }
    if (auto slot = SingleSlot(*f)) {
      // c*x + k in S  <=>  x in {(s - k) / c}
      const Rational c = f->coeffs.begin()->second;
      std::vector<Rational> xs;
      for (const auto& s : vs) xs.push_back((s - f->constant) / c);
      std::sort(xs.begin(), xs.end());
      Range& r = box.ranges[*slot];
      bool changed = false;
      if (p == Predicate::kIn) {
        changed = RestrictNumbers(r, xs);
      } else {
        for (const auto& x : xs) changed |= ExcludeNumber(r, x);
      }
      if (r.IsEmpty()) box.empty = true;
      return changed;
    }
    if (p == Predicate::kNotIn) return false;
    LinearForm upper = *f;  // f - max <= 0
    upper.constant -= vs.back();
    LinearForm lower;  // min - f <= 0
    lower.AddScaled(*f, -1);
    lower.constant += vs.front();
    bool changed = ReviseLe(upper, false, box);
    if (!box.empty) changed |= ReviseLe(lower, false, box);
    return changed;
  }
  auto l = Linearize(lhs, slots, box);
  auto r = Linearize(atom.rhs(), slots, box);
  if (!l || !r) return false;
  LinearForm diff = *l;  // lhs - rhs
  diff.AddScaled(*r, -1);
  LinearForm neg;
  neg.AddScaled(diff, -1);
  switch (p) {
    case Predicate::kLe: return ReviseLe(diff, false, box);
    case Predicate::kLt: return ReviseLe(diff, true, box);
    case Predicate::kGe: return ReviseLe(neg, false, box);
    case Predicate::kGt: return ReviseLe(neg, true, box);
    case Predicate::kEq: {
      bool changed = ReviseLe(diff, false, box);
      if (!box.empty) changed |= ReviseLe(neg, false, box);
      return changed;
    }
    case Predicate::kNe: {
      if (diff.coeffs.empty()) {
        if (diff.constant == 0) box.empty = true;
        return box.empty;
      }
      if (auto slot = SingleSlot(diff)) {
        const Rational c = diff.coeffs.begin()->second;
        Range& rg = box.ranges[*slot];
        const bool changed = ExcludeNumber(rg, Rational(-diff.constant / c));
        if (rg.IsEmpty()) box.empty = true;
        return changed;
      }
      return false;
    }
    default: return false;
  }
}

inline void PropagateConjunction(const std::vector<Constraint>& atoms, const SlotMap& slots,
                                 Box& box, int max_rounds) {
  for (int round = 0; round < max_rounds && !box.empty; ++round) {
    bool changed = false;
    for (const auto& a : atoms) {
      changed |= Revise(a, slots, box);
      if (box.empty) return;
    }
    if (!changed) return;
  }
}

inline bool IsNumericNe(const Constraint& atom, const SlotMap& slots, const Box& box) {
  return atom.predicate() == Predicate::kNe && !IsStringTerm(atom.lhs(), slots, box) &&
         !IsStringTerm(atom.rhs(), slots, box);
}

using Conjunction = std::vector<Constraint>;

// DNF of an NNF constraint; nullopt when the branch count would exceed `cap`.
// Numeric disequalities are split into < and >.
inline std::optional<std::vector<Conjunction>> ToDnf(const Constraint& c, size_t cap,
                                                     const SlotMap& slots, const Box& proto) {
  using K = Constraint::Kind;
  switch (c.kind()) {
    case K::kTrue: return std::vector<Conjunction>{{}};
    case K::kFalse: return std::vector<Conjunction>{};
    case K::kAtom:
      if (IsNumericNe(c, slots, proto)) {
        if (cap < 2) return std::nullopt;
        return std::vector<Conjunction>{{Lt(c.lhs(), c.rhs())}, {Gt(c.lhs(), c.rhs())}};
      }
      return std::vector<Conjunction>{{c}};
    case K::kOr: {
      std::vector<Conjunction> out;
      for (const auto& ch : c.children()) {
        auto sub = ToDnf(ch, cap, slots, proto);
        if (!sub || out.size() + sub->size() > cap) return std::nullopt;
        out.insert(out.end(), sub->begin(), sub->end());
      }
      return out;
    }
    case K::kAnd: {
      std::vector<Conjunction> out{{}};
      for (const auto& ch : c.children()) {
        auto sub = ToDnf(ch, cap, slots, proto);
        if (!sub || out.size() * sub->size() > cap) return std::nullopt;
        std::vector<Conjunction> next;
        for (const auto& a : out) {
          for (const auto& b : *sub) {
            Conjunction merged = a;
            merged.insert(merged.end(), b.begin(), b.end());
            next.push_back(std::move(merged));
          }
        }
        out = std::move(next);
      }
      return out;
    }
    default:
      throw std::logic_error("ToDnf: constraint not in negation normal form");
  }
}

// Recursive narrowing used past the DNF cap: conjunctions iterate to a
// fixpoint, disjunctions join the boxes of their branches.
inline Box PropagateNnf(const Constraint& c, const SlotMap& slots, Box box, int max_rounds) {
  using K = Constraint::Kind;
  if (box.empty) return box;
  switch (c.kind()) {
    case K::kTrue: return box;
    case K::kFalse: box.empty = true; return box;
    case K::kAtom:
      if (IsNumericNe(c, slots, box)) {
        Box a = box, b = box;
        Revise(Lt(c.lhs(), c.rhs()), slots, a);
        Revise(Gt(c.lhs(), c.rhs()), slots, b);
        return JoinBoxes({a, b});
      }
      Revise(c, slots, box);
      return box;
    case K::kOr: {
      std::vector<Box> parts;
      for (const auto& ch : c.children()) parts.push_back(PropagateNnf(ch, slots, box, max_rounds));
      return JoinBoxes(parts);
    }
    case K::kAnd:
      for (int round = 0; round < max_rounds; ++round) {
        Box before = box;
        for (const auto& ch : c.children()) {
          box = PropagateNnf(ch, slots, box, max_rounds);
          if (box.empty) return box;
        }
        if (box == before) break;
      }
      return box;
    default:
      throw std::logic_error("PropagateNnf: constraint not in negation normal form");
  }
}

// A constraint prepared for repeated narrowing over one schema.
class Propagator {
 public:
  Propagator(const Constraint& c, const ConstrainedSchema& schema, const SolverOptions& opts)
      : slots_(schema), nnf_(Normalize(c)), opts_(opts) {
    dnf_ = ToDnf(nnf_, opts.dnf_cap, slots_, slots_.InitialBox());
  }

  const SlotMap& slots() const { return slots_; }
  bool exact_dnf() const { return dnf_.has_value(); }

  // Non-empty narrowed boxes, one per surviving branch.
  std::vector<Box> Branches(const Box& start) const {
    std::vector<Box> out;
    if (start.empty) return out;
    if (dnf_) {
      for (const auto& conj : *dnf_) {
        Box b = start;
        PropagateConjunction(conj, slots_, b, opts_.max_rounds);
        if (!b.empty) out.push_back(std::move(b));
      }
    } else {
      Box b = PropagateNnf(nnf_, slots_, start, opts_.max_rounds);
      if (!b.empty) out.push_back(std::move(b));
    }
    return out;
  }

  Box Hull(const Box& start) const { return JoinBoxes(Branches(start)); }

 private:
  SlotMap slots_;
  Constraint nnf_;
  SolverOptions opts_;
  std::optional<std::vector<Conjunction>> dnf_;
};

// Finite candidate values of a range, or nullopt if infinite / above `cap`.
inline std::optional<std::vector<Value>> Candidates(const Range& r, uint64_t cap) {
  std::vector<Value> out;
  if (!r.numeric) {
    out.assign(r.strings.begin(), r.strings.end());
    return out;
  }
  if (r.numbers) {
    out.assign(r.numbers->begin(), r.numbers->end());
    return out;
  }
  if (r.IsEmpty()) return out;
  if (r.integral && r.lo.is_finite() && r.hi.is_finite()) {
    const Integer n = boost::multiprecision::numerator(r.hi.value()) -
                      boost::multiprecision::numerator(r.lo.value()) + 1;
    if (n > cap) return std::nullopt;
    for (Integer k = 0; k < n; ++k) out.push_back(Rational(r.lo.value() + Rational(k)));
    return out;
  }
  if (r.IsPoint()) {
    out.push_back(r.lo.value());
    return out;
  }
  return std::nullopt;
}

// Calls fn(assignment) over the cartesian product of `cands`; stops when fn
// returns false.
template <typename F>
void ForEachAssignment(const std::vector<std::vector<Value>>& cands, F&& fn) {
  for (const auto& c : cands) {
    if (c.empty()) return;
  }
  std::vector<size_t> idx(cands.size(), 0);
  std::vector<Value> cur(cands.size());
  for (size_t i = 0; i < cands.size(); ++i) cur[i] = cands[i][0];
  while (true) {
    if (!fn(static_cast<const std::vector<Value>&>(cur))) return;
    size_t k = 0;
    for (; k < cands.size(); ++k) {
      if (++idx[k] < cands[k].size()) {
        cur[k] = cands[k][idx[k]];
        break;
      }
      idx[k] = 0;
      cur[k] = cands[k][0];
    }
    if (k == cands.size()) return;
  }
}

// A handful of representative members of a non-empty range.
inline std::vector<Value> SampleValues(const Range& r) {
  std::vector<Value> out;
  if (!r.numeric) {
    for (size_t i = 0; i < r.strings.size() && i < 16; ++i) out.push_back(r.strings[i]);
    return out;
  }
  if (r.numbers) {
    const auto& ns = *r.numbers;
    if (ns.size() <= 16) {
      out.assign(ns.begin(), ns.end());
    } else {
      out = {ns.front(), ns.back(), ns[ns.size() / 2], ns[ns.size() / 4], ns[3 * ns.size() / 4]};
    }
    return out;
  }
  std::vector<Rational> picks;
  const bool lo_f = r.lo.is_finite();
  const bool hi_f = r.hi.is_finite();
  if (lo_f) picks.push_back(r.lo.value());
  if (hi_f) picks.push_back(r.hi.value());
  if (lo_f && hi_f) {
    const Rational mid = (r.lo.value() + r.hi.value()) / 2;
    picks.push_back(r.integral ? Rational(Floor(mid)) : mid);
    picks.push_back(r.lo.value() + (r.hi.value() - r.lo.value()) / 4);
    picks.push_back(r.integral ? Rational(Ceil(mid)) : r.lo.value() + 3 * (r.hi.value() - r.lo.value()) / 4);
  } else if (lo_f) {
    picks.push_back(r.lo.value() + 1);
    picks.push_back(r.lo.value() + 100);
  } else if (hi_f) {
    picks.push_back(r.hi.value() - 1);
    picks.push_back(r.hi.value() - 100);
  }
  picks.push_back(0);
  picks.push_back(1);
  picks.push_back(-1);
  std::vector<Rational> seen;
  for (auto& p : picks) {
    if (r.integral) p = Rational(Ceil(p));
    if (!r.ContainsNumber(p)) continue;
    if (std::find(seen.begin(), seen.end(), p) != seen.end()) continue;
    seen.push_back(p);
    out.push_back(p);
  }
  return out;
}

inline void FixRange(Range& r, const Value& v) {
  if (!r.numeric) {
    r.strings = {AsString(v)};
    return;
  }
  r.numbers = std::vector<Rational>{AsNumber(v)};
  Tighten(r);
}

// Depth-first search for an assignment satisfying `eval`, fixing the slots
// in `order` one at a time and re-narrowing after each choice.
inline std::optional<Tuple> FindWitness(const Propagator& prop, const Box& start,
                                        const std::vector<int>& order,
                                        const ConstraintEvaluator& eval, int& budget) {
  std::function<std::optional<Tuple>(const Box&, size_t)> dfs =
      [&](const Box& box, size_t depth) -> std::optional<Tuple> {
    if (--budget < 0) return std::nullopt;
    if (depth == order.size()) {
      Tuple t(box.ranges.size(), Value(Rational(0)));
      for (size_t i = 0; i < box.ranges.size(); ++i) {
        const Range& r = box.ranges[i];
        if (!r.IsPoint()) continue;
        t[i] = r.numeric ? Value(r.numbers ? r.numbers->front() : r.lo.value())
                         : Value(r.strings.front());
      }
      if (eval(t)) return t;
      return std::nullopt;
    }
    const int slot = order[depth];
    for (const auto& v : SampleValues(box.ranges[slot])) {
      Box fixed = box;
      FixRange(fixed.ranges[slot], v);
      for (const auto& b : prop.Branches(fixed)) {
        if (auto w = dfs(b, depth + 1)) return w;
        if (budget < 0) return std::nullopt;
      }
    }
    return std::nullopt;
  };
  return dfs(start, 0);
}

inline std::vector<int> MentionedSlots(const Constraint& c, const SlotMap& slots) {
  std::vector<int> out;
  for (const auto& name : MentionedAttributes(c)) out.push_back(slots.Slot(name));
  std::sort(out.begin(), out.end());
  return out;
}

struct Enumeration {
  SolutionCount::Kind kind = SolutionCount::Kind::kFinite;
  uint64_t count = 0;
  std::vector<Tuple> tuples;  // filled when materializing
};

// Shared core of SolutionCount and EnumerateSolutions. Counts distinct
// projections of sol(c) onto the visible attributes.
inline Enumeration EnumerateImpl(const Constraint& c, const ConstrainedSchema& schema,
                                 uint64_t cap, const SolverOptions& opts, bool materialize) {
  Enumeration result;
  Propagator prop(c, schema, opts);
  const SlotMap& slots = prop.slots();
  const Box start = slots.InitialBox();
  const std::vector<Box> branches = prop.Branches(start);
  if (branches.empty()) return result;

  const size_t visible = schema.attributes.size();
  const std::vector<int> mentioned = MentionedSlots(c, slots);
  auto is_mentioned = [&](int s) {
    return std::binary_search(mentioned.begin(), mentioned.end(), s);
  };

  // Per-slot candidates: union over branches of finite candidate sets.
  auto union_candidates = [&](int slot) -> std::optional<std::vector<Value>> {
    std::set<Value> all;
    for (const auto& b : branches) {
      auto cs = Candidates(b.ranges[slot], opts.enum_cap);
      if (!cs) return std::nullopt;
      all.insert(cs->begin(), cs->end());
    }
    return std::vector<Value>(all.begin(), all.end());
  };

  std::vector<int> enum_slots;        // enumerated and projected
  std::vector<int> exist_finite;      // hidden, enumerated and discarded
  bool exist_infinite = false;        // some hidden slot is not enumerable
  Integer multiplier = 1;             // unmentioned visible slots (counting only)
  std::vector<std::vector<Value>> cands;
  std::vector<std::vector<Value>> hidden_cands;
  Integer space = 1;

  for (size_t s = 0; s < slots.names.size(); ++s) {
    const int slot = static_cast<int>(s);
    const bool vis = s < visible;
    if (vis && !is_mentioned(slot) && !materialize) {
      auto size = slots.domains[s]->Size();
      if (!size) {
        result.kind = SolutionCount::Kind::kInfinite;
        return result;
      }
      multiplier *= *size;
      continue;
    }
    if (!vis && !is_mentioned(slot)) continue;
    auto cs = vis ? union_candidates(slot) : union_candidates(slot);
    if (!cs) {
      if (vis) {
        result.kind = SolutionCount::Kind::kInfinite;
        return result;
      }
      exist_infinite = true;
      continue;
    }
    space *= cs->size();
    if (vis) {
      enum_slots.push_back(slot);
      cands.push_back(std::move(*cs));
    } else {
      exist_finite.push_back(slot);
      hidden_cands.push_back(std::move(*cs));
    }
  }
  if (exist_infinite) {
    // Hidden slots are decided by narrowing below, not enumerated.
    space = 1;
    for (const auto& cs : cands) space *= cs.size();
  }
  if (space > opts.enum_cap) {
    result.kind = SolutionCount::Kind::kExceedsCap;
    return result;
  }

  const ConstraintEvaluator eval(c, slots.names);
  Tuple full(slots.names.size(), Value(Rational(0)));
  uint64_t count = 0;
  bool over = false;
  ForEachAssignment(cands, [&](const std::vector<Value>& vals) {
    for (size_t i = 0; i < enum_slots.size(); ++i) full[enum_slots[i]] = vals[i];
    bool exists = false;
    if (exist_infinite) {
      Box fixed = start;
      for (size_t i = 0; i < enum_slots.size(); ++i) {
        FixRange(fixed.ranges[enum_slots[i]], vals[i]);
      }
      // Over-approximates: kept unless narrowing refutes it.
      exists = !prop.Branches(fixed).empty();
    } else if (exist_finite.empty()) {
      exists = eval(full);
    } else {
      ForEachAssignment(hidden_cands, [&](const std::vector<Value>& hv) {
        for (size_t i = 0; i < exist_finite.size(); ++i) full[exist_finite[i]] = hv[i];
        exists = eval(full);
        return !exists;
      });
    }
    if (!exists) return true;
    ++count;
    if (materialize) {
      result.tuples.emplace_back(full.begin(), full.begin() + visible);
    }
    if (Integer(count) * multiplier > cap) {
      over = true;
      return false;
    }
    return true;
  });
  if (over) {
    result.kind = SolutionCount::Kind::kExceedsCap;
    result.tuples.clear();
    return result;
  }
  result.count = static_cast<uint64_t>(Integer(count) * multiplier);
  return result;
}

}  // namespace internal

// Sound enclosure of [inf(c, a), sup(c, a)]; exact when every attribute
// relevant to `c` ends up with an enumerable candidate set.
inline Bounds AttributeBounds(const Constraint& c, const ConstrainedSchema& schema,
                              const std::string& attr, const SolverOptions& opts = {}) {
  using namespace internal;
  const Attribute* a = schema.Find(attr);
  if (!a) throw Error(ErrorKind::kValidation, "unknown attribute '" + attr + "'");
  if (!a->domain.is_numeric()) {
    throw Error(ErrorKind::kType, "bounds requested for string attribute '" + attr + "'");
  }
  Propagator prop(c, schema, opts);
  const SlotMap& slots = prop.slots();
  const Box hull = prop.Hull(slots.InitialBox());
  if (hull.empty) return Bounds::Empty();

  std::vector<int> relevant = MentionedSlots(c, slots);
  const int target = slots.Slot(attr);
  if (!std::binary_search(relevant.begin(), relevant.end(), target)) {
    relevant.insert(std::upper_bound(relevant.begin(), relevant.end(), target), target);
  }
  // Enumerate the relevant attributes that have finite candidate sets; the
  // others are decided per assignment by narrowing (an over-approximation,
  // so the result stays sound and is exact when nothing is left over).
  std::vector<int> finite_slots;
  std::vector<std::vector<Value>> cands;
  bool residual = false;
  Integer space = 1;
  for (int s : relevant) {
    auto cs = Candidates(hull.ranges[s], opts.enum_cap);
    if (!cs) {
      if (s == target) break;
      residual = true;
      continue;
    }
    space *= cs->size();
    finite_slots.push_back(s);
    cands.push_back(std::move(*cs));
  }
  const auto pos_it = std::find(finite_slots.begin(), finite_slots.end(), target);
  if (pos_it != finite_slots.end() && space <= opts.enum_cap) {
    const size_t pos = pos_it - finite_slots.begin();
    const ConstraintEvaluator eval(c, slots.names);
    const Box start = slots.InitialBox();
    Tuple full(slots.names.size(), Value(Rational(0)));
    std::optional<Rational> lo, hi;
    ForEachAssignment(cands, [&](const std::vector<Value>& vals) {
      const Rational& x = AsNumber(vals[pos]);
      if (lo && *lo <= x && x <= *hi) return true;  // cannot widen
      bool ok;
      if (residual) {
        Box fixed = start;
        for (size_t i = 0; i < finite_slots.size(); ++i) FixRange(fixed.ranges[finite_slots[i]], vals[i]);
        ok = !prop.Branches(fixed).empty();
      } else {
        for (size_t i = 0; i < finite_slots.size(); ++i) full[finite_slots[i]] = vals[i];
        ok = eval(full);
      }
      if (ok) {
        if (!lo || x < *lo) lo = x;
        if (!hi || x > *hi) hi = x;
      }
      return true;
    });
    if (!lo) return Bounds::Empty();
    return Bounds::Closed(*lo, *hi);
  }
  const Range& r = hull.ranges[target];
  return Bounds{r.lo, r.hi, r.lo_open, r.hi_open, false};
}

// yes/no are definitive; unknown means neither a witness nor a refutation
// was found and must be read as "possibly satisfiable".
inline Satisfiability Satisfiable(const Constraint& c, const ConstrainedSchema& schema,
                                  const SolverOptions& opts = {}) {
  using namespace internal;
  Propagator prop(c, schema, opts);
  const SlotMap& slots = prop.slots();
  const std::vector<Box> branches = prop.Branches(slots.InitialBox());
  if (branches.empty()) return Satisfiability::kNo;
  const std::vector<int> mentioned = MentionedSlots(c, slots);
  const ConstraintEvaluator eval(c, slots.names);

  // Exact when the hull leaves finitely many candidates.
  const Box hull = JoinBoxes(branches);
  std::vector<std::vector<Value>> cands;
  Integer space = 1;
  bool enumerable = true;
  for (int s : mentioned) {
    auto cs = Candidates(hull.ranges[s], opts.enum_cap);
    if (!cs || (space *= cs->size()) > opts.enum_cap) {
      enumerable = false;
      break;
    }
    cands.push_back(std::move(*cs));
  }
  if (enumerable) {
    Tuple full(slots.names.size(), Value(Rational(0)));
    bool found = false;
    ForEachAssignment(cands, [&](const std::vector<Value>& vals) {
      for (size_t i = 0; i < mentioned.size(); ++i) full[mentioned[i]] = vals[i];
      found = eval(full);
      return !found;
    });
    return found ? Satisfiability::kYes : Satisfiability::kNo;
  }
  int budget = opts.witness_budget;
  for (const auto& b : branches) {
    if (FindWitness(prop, b, mentioned, eval, budget)) return Satisfiability::kYes;
    if (budget < 0) break;
  }
  return Satisfiability::kUnknown;
}

// |sol(c)| over the visible attributes of `schema` (hidden attributes are
// existentially quantified), capped at `cap`.
inline SolutionCount CountSolutions(const Constraint& c, const ConstrainedSchema& schema,
                                    uint64_t cap, const SolverOptions& opts = {}) {
  if (cap < 1) throw std::invalid_argument("solution count cap must be >= 1");
  auto e = internal::EnumerateImpl(c, schema, cap, opts, false);
  return SolutionCount{e.kind, e.count};
}

// Maximum symmetric-difference distance between two relations drawn from
// sol(c): |sol(c)| (the full solution set against the empty relation), or
// +inf when the count is infinite or above `cap`.
inline SensitivityValue Diameter(const Constraint& c, const ConstrainedSchema& schema,
                                 uint64_t cap, const SolverOptions& opts = {}) {
  const SolutionCount n = CountSolutions(c, schema, cap, opts);
  if (n.kind != SolutionCount::Kind::kFinite) return SensitivityValue::Infinity();
  return SensitivityValue(Rational(static_cast<int64_t>(n.count)));
}

struct SolutionSet {
  SolutionCount::Kind kind = SolutionCount::Kind::kFinite;
  std::vector<Tuple> tuples;  // visible attributes, sorted
};

// Materializes sol(c) (visible attributes) when it has at most `cap` tuples.
inline SolutionSet EnumerateSolutions(const Constraint& c, const ConstrainedSchema& schema,
                                      uint64_t cap, const SolverOptions& opts = {}) {
  auto e = internal::EnumerateImpl(c, schema, cap, opts, true);
  SolutionSet out{e.kind, std::move(e.tuples)};
  std::sort(out.tuples.begin(), out.tuples.end());
  out.tuples.erase(std::unique(out.tuples.begin(), out.tuples.end()), out.tuples.end());
  return out;
}

// Convenience overloads on a schema's own constraint.
inline Bounds AttributeBounds(const ConstrainedSchema& s, const std::string& attr,
                              const SolverOptions& opts = {}) {
  return AttributeBounds(s.constraint, s, attr, opts);
}

}  // namespace rasens

#endif  // RASENS_SOLVER_HPP_
