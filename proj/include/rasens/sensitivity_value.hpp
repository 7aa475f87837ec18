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

#ifndef RASENS_SENSITIVITY_VALUE_HPP_
#define RASENS_SENSITIVITY_VALUE_HPP_

#include <algorithm>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include "rasens/rational.hpp"

namespace rasens {

// Non-negative rational extended with +inf. Multiplication follows the
// measure-theory convention 0 * inf = 0.
class SensitivityValue {
 public:
  SensitivityValue() = default;
  SensitivityValue(Rational value) : value_(std::move(value)) {  // NOLINT
    if (*value_ < 0) throw std::invalid_argument("sensitivity must be >= 0");
  }
  SensitivityValue(int64_t value) : SensitivityValue(Rational(value)) {}  // NOLINT

  static SensitivityValue Infinity() {
    SensitivityValue v;
    v.value_.reset();
    return v;
  }

  bool is_infinite() const { return !value_.has_value(); }
  bool is_finite() const { return value_.has_value(); }
  bool is_zero() const { return value_ && *value_ == 0; }
  const Rational& value() const {
    if (!value_) throw std::logic_error("SensitivityValue: infinite");
    return *value_;
  }

  friend SensitivityValue operator*(const SensitivityValue& a,
                                    const SensitivityValue& b) {
    if (a.is_zero() || b.is_zero()) return SensitivityValue(0);
    if (a.is_infinite() || b.is_infinite()) return Infinity();
    return SensitivityValue(Rational(*a.value_ * *b.value_));
  }

  friend bool operator==(const SensitivityValue& a, const SensitivityValue& b) {
    return a.value_ == b.value_;
  }
  friend bool operator!=(const SensitivityValue& a, const SensitivityValue& b) {
    return !(a == b);
  }
  friend bool operator<(const SensitivityValue& a, const SensitivityValue& b) {
    if (a.is_infinite()) return false;
    if (b.is_infinite()) return true;
    return *a.value_ < *b.value_;
  }
  friend bool operator<=(const SensitivityValue& a, const SensitivityValue& b) {
    return !(b < a);
  }
  friend bool operator>(const SensitivityValue& a, const SensitivityValue& b) {
    return b < a;
  }
  friend bool operator>=(const SensitivityValue& a, const SensitivityValue& b) {
    return !(a < b);
  }

  std::string ToString() const {
    return value_ ? rasens::ToString(*value_) : std::string("inf");
  }
  double ToDouble() const {
    return value_ ? rasens::ToDouble(*value_)
                  : std::numeric_limits<double>::infinity();
  }

 private:
  std::optional<Rational> value_ = Rational(0);
};

inline SensitivityValue Min(const SensitivityValue& a, const SensitivityValue& b) {
  return b < a ? b : a;
}
inline SensitivityValue Max(const SensitivityValue& a, const SensitivityValue& b) {
  return a < b ? b : a;
}

inline std::ostream& operator<<(std::ostream& os, const SensitivityValue& v) {
  return os << v.ToString();
}

}  // namespace rasens

#endif  // RASENS_SENSITIVITY_VALUE_HPP_
