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

#ifndef RASENS_RATIONAL_HPP_
#define RASENS_RATIONAL_HPP_

#include <cctype>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace rasens {

// All bound and sensitivity computations are carried out on exact rationals.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational MakeRational(int64_t num, int64_t den = 1) {
  return Rational(Integer(num), Integer(den));
}

inline bool IsInteger(const Rational& r) {
  return boost::multiprecision::denominator(r) == 1;
}

inline Integer Floor(const Rational& r) {
  const Integer& num = boost::multiprecision::numerator(r);
  const Integer& den = boost::multiprecision::denominator(r);
  Integer q = num / den;  // truncates toward zero
  if (num < 0 && q * den != num) --q;
  return q;
}

inline Integer Ceil(const Rational& r) {
  const Integer& num = boost::multiprecision::numerator(r);
  const Integer& den = boost::multiprecision::denominator(r);
  Integer q = num / den;
  if (num > 0 && q * den != num) ++q;
  return q;
}

inline double ToDouble(const Rational& r) {
  return r.convert_to<double>();
}

// Renders "p" for integers and "p/q" otherwise.
inline std::string ToString(const Rational& r) { return r.str(); }

// Exact decimal rendering when the denominator only has factors 2 and 5,
// "p/q" otherwise.
inline std::string ToDecimalString(const Rational& r) {
  Integer den = boost::multiprecision::denominator(r);
  Integer num = boost::multiprecision::numerator(r);
  int twos = 0, fives = 0;
  while (den % 2 == 0) { den /= 2; ++twos; }
  while (den % 5 == 0) { den /= 5; ++fives; }
  if (den != 1) return r.str();
  const int digits = std::max(twos, fives);
  if (digits == 0) return num.str();
  Integer scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  const bool negative = num < 0;
  if (negative) num = -num;
  Integer scaled = num * scale / boost::multiprecision::denominator(r);
  std::string whole = Integer(scaled / scale).str();
  std::string frac = Integer(scaled % scale).str();
  frac.insert(0, static_cast<size_t>(digits) - frac.size(), '0');
  while (!frac.empty() && frac.back() == '0') frac.pop_back();
  std::string out = negative ? "-" : "";
  out += whole;
  if (!frac.empty()) out += "." + frac;
  return out;
}

// Parses an optionally signed decimal ("12", "-0.25", "1e3", "3.5E-2") or a
// fraction "p/q". Returns nullopt on malformed input.
inline std::optional<Rational> ParseRational(std::string_view text) {
  size_t i = 0;
  auto at_end = [&] { return i >= text.size(); };
  bool negative = false;
  if (!at_end() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  Integer mantissa = 0;
  int frac_digits = 0;
  bool any_digit = false;
  while (!at_end() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    mantissa = mantissa * 10 + (text[i] - '0');
    any_digit = true;
    ++i;
  }
  if (!at_end() && text[i] == '/') {
    ++i;
    Integer den = 0;
    bool den_digit = false;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      den = den * 10 + (text[i] - '0');
      den_digit = true;
      ++i;
    }
    if (!any_digit || !den_digit || !at_end() || den == 0) return std::nullopt;
    Rational r(mantissa, den);
    return negative ? Rational(-r) : r;
  }
  if (!at_end() && text[i] == '.') {
    ++i;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      mantissa = mantissa * 10 + (text[i] - '0');
      ++frac_digits;
      any_digit = true;
      ++i;
    }
  }
  if (!any_digit) return std::nullopt;
  long exponent = 0;
  if (!at_end() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (!at_end() && (text[i] == '+' || text[i] == '-')) {
      exp_negative = text[i] == '-';
      ++i;
    }
    bool exp_digit = false;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      exponent = exponent * 10 + (text[i] - '0');
      if (exponent > 4096) return std::nullopt;
      exp_digit = true;
      ++i;
    }
    if (!exp_digit) return std::nullopt;
    if (exp_negative) exponent = -exponent;
  }
  if (!at_end()) return std::nullopt;
  exponent -= frac_digits;
  Integer scale = 1;
  for (long k = 0; k < (exponent < 0 ? -exponent : exponent); ++k) scale *= 10;
  Rational r = exponent < 0 ? Rational(mantissa, scale)
                            : Rational(mantissa * scale);
  return negative ? Rational(-r) : r;
}

// A rational extended with -inf and +inf. Used for interval endpoints.
class ExtRational {
 public:
  enum class Kind { kNegInf, kFinite, kPosInf };

  ExtRational() = default;
  ExtRational(Rational value) : value_(std::move(value)) {}  // NOLINT
  ExtRational(int64_t value) : value_(value) {}              // NOLINT

  static ExtRational NegInf() { return ExtRational(Kind::kNegInf); }
  static ExtRational PosInf() { return ExtRational(Kind::kPosInf); }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::kFinite; }
  bool is_neg_inf() const { return kind_ == Kind::kNegInf; }
  bool is_pos_inf() const { return kind_ == Kind::kPosInf; }
  const Rational& value() const {
    if (!is_finite()) throw std::logic_error("ExtRational: infinite value");
    return value_;
  }

  ExtRational operator-() const {
    switch (kind_) {
      case Kind::kNegInf: return PosInf();
      case Kind::kPosInf: return NegInf();
      default: return ExtRational(Rational(-value_));
    }
  }

  // Infinite operands of opposite sign never meet in interval sums of lower
  // (resp. upper) endpoints, so mixing them is a caller bug.
  friend ExtRational operator+(const ExtRational& a, const ExtRational& b) {
    if (a.is_finite() && b.is_finite()) return ExtRational(Rational(a.value_ + b.value_));
    if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf())) {
      throw std::logic_error("ExtRational: inf - inf");
    }
    return a.is_finite() ? b : a;
  }

  // Multiplication by a finite, non-zero scalar.
  ExtRational Scale(const Rational& k) const {
    if (is_finite()) return ExtRational(Rational(value_ * k));
    if (k > 0) return *this;
    if (k < 0) return -*this;
    throw std::logic_error("ExtRational: 0 * inf");
  }

  friend bool operator==(const ExtRational& a, const ExtRational& b) {
    if (a.kind_ != b.kind_) return false;
    return !a.is_finite() || a.value_ == b.value_;
  }
  friend bool operator<(const ExtRational& a, const ExtRational& b) {
    if (a.kind_ != b.kind_) return static_cast<int>(a.kind_) < static_cast<int>(b.kind_);
    return a.is_finite() && a.value_ < b.value_;
  }
  friend bool operator!=(const ExtRational& a, const ExtRational& b) { return !(a == b); }
  friend bool operator>(const ExtRational& a, const ExtRational& b) { return b < a; }
  friend bool operator<=(const ExtRational& a, const ExtRational& b) { return !(b < a); }
  friend bool operator>=(const ExtRational& a, const ExtRational& b) { return !(a < b); }

  std::string ToString() const {
    switch (kind_) {
      case Kind::kNegInf: return "-inf";
      case Kind::kPosInf: return "inf";
      default: return rasens::ToString(value_);
    }
  }

  double ToDouble() const {
    switch (kind_) {
      case Kind::kNegInf: return -std::numeric_limits<double>::infinity();
      case Kind::kPosInf: return std::numeric_limits<double>::infinity();
      default: return rasens::ToDouble(value_);
    }
  }

 private:
  explicit ExtRational(Kind kind) : kind_(kind) {}

  Kind kind_ = Kind::kFinite;
  Rational value_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const ExtRational& x) {
  return os << x.ToString();
}

}  // namespace rasens

#endif  // RASENS_RATIONAL_HPP_
