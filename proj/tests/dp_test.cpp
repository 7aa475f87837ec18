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

#include "rasens/dp.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

namespace rasens {
namespace {

using testing::Q;

TEST(RngTest, SameSeedSameStream) {
  Rng a(42);
  Rng b(42);
  Rng c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const uint64_t x = a.NextU64();
    EXPECT_EQ(x, b.NextU64());
    differs = differs || x != c.NextU64();
  }
  EXPECT_TRUE(differs);
}

TEST(RngTest, SplitIsDeterministicAndIndependentOfChildUse) {
  Rng a(7);
  Rng b(7);
  Rng a1 = a.Split();
  Rng b1 = b.Split();
  for (int i = 0; i < 10; ++i) a1.NextU64();
  EXPECT_EQ(a.NextU64(), b.NextU64());
  EXPECT_EQ(a1.NextU64(), (b1.NextU64(), b1.NextU64(), b1.NextU64(), b1.NextU64(),
                           b1.NextU64(), b1.NextU64(), b1.NextU64(), b1.NextU64(),
                           b1.NextU64(), b1.NextU64(), b1.NextU64()));
}

TEST(RngTest, UniformStaysInOpenInterval) {
  Rng r(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.Uniform01();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(LaplaceTest, InverseCdfMatchesCdf) {
  for (double u : {0.01, 0.2, 0.5, 0.77, 0.999}) {
    EXPECT_NEAR(LaplaceCdf(3.0, LaplaceFromUniform(3.0, u)), u, 1e-12) << u;
  }
  EXPECT_THROW(LaplaceSample(0.0, *std::make_unique<Rng>(1)), std::invalid_argument);
}

TEST(LaplaceTest, MomentsAreClose) {
  Rng r(99);
  const int n = 200000;
  double sum = 0;
  double sq = 0;
  for (int i = 0; i < n; ++i) {
    const double x = LaplaceSample(2.0, r);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.0, 0.05);
  EXPECT_NEAR(sq / n - mean * mean, 8.0, 0.25);
}

TEST(DpReleaseTest, ScaleIsSensitivityOverEpsilon) {
  Rng r(5);
  const DpAnswer a = DpRelease(Rational(10), SensitivityValue(50), Q(1, 2), r);
  EXPECT_DOUBLE_EQ(a.scale, 100.0);
  EXPECT_EQ(a.seed, 5u);
  EXPECT_TRUE(a.true_value_withheld);
  Rng again(5);
  EXPECT_EQ(DpRelease(Rational(10), SensitivityValue(50), Q(1, 2), again).noisy_value,
            a.noisy_value);
}

TEST(DpReleaseTest, RefusesInfiniteSensitivityAndBadEpsilon) {
  Rng r(1);
  try {
    DpRelease(Rational(1), SensitivityValue::Infinity(), Rational(1), r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnbounded);
  }
  try {
    DpRelease(Rational(1), SensitivityValue(1), Rational(0), r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
  }
}

TEST(DpReleaseTest, ZeroSensitivityReleasesExactValueWithWarning) {
  Rng r(1);
  const DpAnswer a = DpRelease(Q(7, 2), SensitivityValue(0), Rational(1), r);
  EXPECT_EQ(a.noisy_value, 3.5);
  ASSERT_EQ(a.warnings.size(), 1u);
}

TEST(DpAnswerQueryTest, EndToEnd) {
  const Catalog cat = testing::CatalogOf(testing::ReadSample("weight_height.schema"));
  const AnnotatedQuery q = Annotate(ParseQuery(testing::ReadSample("avg_weight_filtered.raq")), cat);
  const SensitivityReport rep = Analyze(q);
  const Database db = {
      {"R", LoadRelation(testing::ReadSample("weight_height.csv"), cat.at("R"))}};
  Rng r(11);
  const DpAnswer a = DpAnswerQuery(q, rep, db, DpParams{Rational(1), 11}, r);
  EXPECT_EQ(a.gs_used, SensitivityValue(50));
  EXPECT_DOUBLE_EQ(a.scale, 50.0);

  const nlohmann::json j = ToJson(a);
  for (const char* key : {"noisy_value", "true_value_withheld", "gs", "epsilon", "scale", "seed",
                          "rng", "mechanism", "note", "warnings"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["rng"], "mt19937_64");
  EXPECT_EQ(j["note"], kMechanismNote);

  const AnnotatedQuery inf = Annotate(ParseQuery("sum(Weight) of R product Q"), cat);
  Rng r2(1);
  EXPECT_THROW(DpAnswerQuery(inf, Analyze(inf), db, DpParams{}, r2), Error);
}

}  // namespace
}  // namespace rasens
