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

// Laplace mechanism calibrated to the analyzer's global sensitivity.

#ifndef RASENS_DP_HPP_
#define RASENS_DP_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rasens/analyzer.hpp"
#include "rasens/engine.hpp"
#include "rasens/error.hpp"
#include "rasens/rational.hpp"
#include "rasens/sensitivity_value.hpp"

namespace rasens {

// Seedable, splittable stream over std::mt19937_64. A child stream is
// seeded from the parent's next output, so sibling streams are fixed by the
// root seed and the order of splits.
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64";

  explicit Rng(uint64_t seed) : seed_(seed), gen_(seed) {}

  uint64_t seed() const { return seed_; }
  uint64_t NextU64() { return gen_(); }

  // Uniform on the open interval (0, 1), 53 bits of resolution.
  double Uniform01() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  Rng Split() { return Rng(gen_()); }

 private:
  uint64_t seed_;
  std::mt19937_64 gen_;
};

// Inverse CDF of Laplace(0, b) at u in (0, 1).
inline double LaplaceFromUniform(double b, double u) {
  const double d = u - 0.5;
  if (d == 0.0) return 0.0;
  const double sign = d > 0 ? 1.0 : -1.0;
  return -b * sign * std::log(1.0 - 2.0 * std::fabs(d));
}

inline double LaplaceSample(double b, Rng& rng) {
  if (!(b > 0)) throw std::invalid_argument("Laplace scale must be positive");
  return LaplaceFromUniform(b, rng.Uniform01());
}

inline double LaplaceCdf(double b, double z) {
  return z < 0 ? 0.5 * std::exp(z / b) : 1.0 - 0.5 * std::exp(-z / b);
}

struct DpParams {
  Rational epsilon = 1;
  uint64_t seed = 0;
};

struct DpAnswer {
  double noisy_value = 0;
  bool true_value_withheld = true;
  SensitivityValue gs_used;
  Rational epsilon = 1;
  double scale = 0;  // b = GS / epsilon
  uint64_t seed = 0;
  std::vector<std::string> warnings;
};

inline constexpr const char* kMechanismNote = "floating-point mechanism, not hardened";

// Releases gamma_f(Q(db)) + Laplace(GS / epsilon) noise drawn from `rng`.
inline DpAnswer DpRelease(const Rational& exact, const SensitivityValue& gs,
                          const Rational& epsilon, Rng& rng) {
  if (epsilon <= 0) throw Error(ErrorKind::kValidation, "epsilon must be positive");
  if (gs.is_infinite()) {
    throw Error(ErrorKind::kUnbounded, "unbounded sensitivity: refusing to add infinite noise");
  }
  DpAnswer a;
  a.gs_used = gs;
  a.epsilon = epsilon;
  a.seed = rng.seed();
  if (gs.is_zero()) {
    a.noisy_value = ToDouble(exact);
    a.warnings.push_back("global sensitivity is 0: the exact answer is released without noise");
    return a;
  }
  a.scale = ToDouble(Rational(gs.value() / epsilon));
  a.noisy_value = ToDouble(exact) + LaplaceSample(a.scale, rng);
  return a;
}

inline DpAnswer DpAnswerQuery(const AnnotatedQuery& q, const SensitivityReport& report,
                              const Database& db, const DpParams& params, Rng& rng) {
  if (report.gs.is_infinite()) {
    throw Error(ErrorKind::kUnbounded, "unbounded sensitivity: refusing to add infinite noise");
  }
  return DpRelease(Evaluate(q, db), report.gs, params.epsilon, rng);
}

inline nlohmann::json ToJson(const DpAnswer& a) {
  nlohmann::json j;
  j["noisy_value"] = a.noisy_value;
  j["true_value_withheld"] = a.true_value_withheld;
  j["gs"] = a.gs_used.ToString();
  j["gs_float"] = FloatJson(a.gs_used.ToDouble());
  j["epsilon"] = ToString(a.epsilon);
  j["epsilon_float"] = ToDouble(a.epsilon);
  j["scale"] = a.scale;
  j["seed"] = a.seed;
  j["rng"] = Rng::kAlgorithm;
  j["mechanism"] = "laplace";
  j["note"] = kMechanismNote;
  j["warnings"] = a.warnings;
  return j;
}

}  // namespace rasens

#endif  // RASENS_DP_HPP_
