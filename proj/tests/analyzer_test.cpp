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

#include "rasens/analyzer.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace rasens {
namespace {

using testing::ReadSample;

Catalog SampleCatalog() {
  std::vector<ConstrainedSchema> all = ParseSchemas(ReadSample("weight_height.schema"));
  for (auto& s : ParseSchemas(ReadSample("small.schema"))) all.push_back(std::move(s));
  for (auto& s : ParseSchemas(
           "relation N { x: int [-3, 2] } relation M { y: real [0, 10]; z: real (-inf, inf) }")) {
    all.push_back(std::move(s));
  }
  return MakeCatalog(all);
}

SensitivityReport Report(const std::string& q, const AnalyzerOptions& opts = {}) {
  return Analyze(ParseQuery(q), SampleCatalog(), opts);
}

bool HasWarning(const SensitivityReport& r, const std::string& needle) {
  for (const auto& w : r.warnings) {
    if (w.find(needle) != std::string::npos) return true;
  }
  return false;
}

TEST(AnalyzerTest, WeightHeightAverages) {
  EXPECT_EQ(Report(ReadSample("avg_weight.raq")).gs, SensitivityValue(75));
  const SensitivityReport f = Report(ReadSample("avg_weight_filtered.raq"));
  EXPECT_EQ(f.gs, SensitivityValue(50));
  EXPECT_EQ(f.top.bounds, Bounds::Closed(0, 100));
  EXPECT_EQ(f.s, SensitivityValue(1));
  EXPECT_TRUE(f.warnings.empty());
}

TEST(AnalyzerTest, OperatorDeltaTable) {
  EXPECT_EQ(OperatorDelta(OpKind::kUnion), SensitivityValue(2));
  EXPECT_EQ(OperatorDelta(OpKind::kIntersection), SensitivityValue(2));
  EXPECT_EQ(OperatorDelta(OpKind::kDifference), SensitivityValue(2));
  EXPECT_EQ(OperatorDelta(OpKind::kRestriction), SensitivityValue(1));
  EXPECT_EQ(OperatorDelta(OpKind::kProjection), SensitivityValue(1));
  EXPECT_EQ(OperatorDelta(OpKind::kProductOne), SensitivityValue(1));
  EXPECT_EQ(OperatorDelta(OpKind::kProductN, 7), SensitivityValue(7));
  EXPECT_EQ(OperatorDelta(OpKind::kProductAgg), SensitivityValue(1));
  EXPECT_EQ(OperatorDelta(OpKind::kGroupAggregate), SensitivityValue(2));
  EXPECT_TRUE(OperatorDelta(OpKind::kProduct).is_infinite());
  EXPECT_EQ(OperatorDelta(OpKind::kLiteral), SensitivityValue(0));
}

TEST(AnalyzerTest, FunctionDeltas) {
  const Bounds b = Bounds::Closed(-3, 2);
  EXPECT_EQ(FunctionDelta(AggKind::kCount, b), SensitivityValue(1));
  EXPECT_EQ(FunctionDelta(AggKind::kSum, b), SensitivityValue(3));
  EXPECT_EQ(FunctionDelta(AggKind::kMax, b), SensitivityValue(5));
  EXPECT_EQ(FunctionDelta(AggKind::kMin, b), SensitivityValue(5));
  EXPECT_EQ(FunctionDelta(AggKind::kAvg, b), SensitivityValue(testing::Q(5, 2)));
  EXPECT_EQ(Report("sum(x) of N").gs, SensitivityValue(3));
}

TEST(AnalyzerTest, UnboundedProductIsInfinite) {
  const SensitivityReport r = Report(ReadSample("unbounded_product.raq"));
  EXPECT_TRUE(r.gs.is_infinite());
  EXPECT_TRUE(HasWarning(r, "unbounded"));
}

TEST(AnalyzerTest, UnboundedAttributeIsInfinite) {
  const SensitivityReport r = Report("sum(z) of M");
  EXPECT_TRUE(r.gs.is_infinite());
  EXPECT_TRUE(HasWarning(r, "'z' is unbounded"));
  EXPECT_EQ(Report("sum(y) of select z <= 0 from M").gs, SensitivityValue(10));
}

TEST(AnalyzerTest, DiameterCapsSensitivity) {
  const SensitivityReport r = Report("count of T product row(K = 1)");
  EXPECT_EQ(r.nodes[0].diam, SensitivityValue(5));
  EXPECT_EQ(r.s, SensitivityValue(5));
  EXPECT_EQ(Report("count of U union V").gs, SensitivityValue(2));
  EXPECT_EQ(Report("count of T productN 3 values(K) {(1), (2), (3), (4)}").gs, SensitivityValue(3));
}

TEST(AnalyzerTest, GroupAndExtrema) {
  EXPECT_EQ(Report("max(A) of group A agg count from T").gs, SensitivityValue(2));
  EXPECT_EQ(Report("count of group A agg count from T").gs, SensitivityValue(2));
  EXPECT_EQ(Report("sum(W) of S").gs, SensitivityValue(150));
}

TEST(AnalyzerTest, StaticallyEmptyQueryHasZeroSensitivity) {
  const SensitivityReport r = Report("count of T minus T");
  EXPECT_EQ(r.satisfiable, Satisfiability::kNo);
  EXPECT_EQ(r.gs, SensitivityValue(0));
  EXPECT_TRUE(HasWarning(r, "statically empty"));
}

TEST(AnalyzerTest, LiteralsAreConstant) {
  EXPECT_EQ(Report("count of row(K = 1)").gs, SensitivityValue(0));
  const SensitivityReport m = Report("max(K) of values(K) {(1), (5)}");
  EXPECT_EQ(m.gs, SensitivityValue(4));
  EXPECT_TRUE(HasWarning(m, "S(Q) = 0"));
}

TEST(AnalyzerTest, DataDependentRightOperandWarns) {
  EXPECT_TRUE(HasWarning(Report("count of T productN 2 U"), "depends on the database"));
  EXPECT_TRUE(Report("count of T productN 2 values(K) {(1), (2)}").warnings.empty());
}

TEST(AnalyzerTest, DeltaOverride) {
  AnalyzerOptions opts;
  opts.delta_override[OpKind::kUnion] = SensitivityValue(1);
  EXPECT_EQ(Report(ReadSample("count_union.raq"), opts).gs, SensitivityValue(1));
  EXPECT_EQ(Report(ReadSample("count_union.raq")).gs, SensitivityValue(2));
}

TEST(AnalyzerTest, JsonReport) {
  const nlohmann::json j = ToJson(Report(ReadSample("avg_weight_filtered.raq")));
  EXPECT_EQ(j["gs"], "50");
  EXPECT_EQ(j["gs_float"], 50.0);
  EXPECT_EQ(j["s"], "1");
  EXPECT_EQ(j["satisfiable"], "yes");
  EXPECT_EQ(j["top"]["fn"], "avg");
  EXPECT_EQ(j["top"]["attr"], "Weight");
  EXPECT_EQ(j["top"]["bounds"]["hi"], "100");
  EXPECT_EQ(j["top"]["delta"], "50");
  ASSERT_EQ(j["nodes"].size(), 2u);
  EXPECT_EQ(j["nodes"][0]["op"], "select");
  EXPECT_EQ(j["nodes"][0]["children"], nlohmann::json::array({1}));
  EXPECT_EQ(j["nodes"][0]["diam"], "inf");
  EXPECT_TRUE(j["nodes"][0]["diam_float"].is_null());
  EXPECT_TRUE(j["nodes"][1].contains("constraint_text"));
  EXPECT_TRUE(j["warnings"].empty());

  const nlohmann::json inf = ToJson(Report(ReadSample("unbounded_product.raq")));
  EXPECT_EQ(inf["gs"], "inf");
  EXPECT_TRUE(inf["gs_float"].is_null());
}

TEST(AnalyzerTest, TableReport) {
  const std::string t = ToTable(Report(ReadSample("avg_weight.raq")));
  EXPECT_NE(t.find("GS = 75"), std::string::npos);
  EXPECT_NE(t.find("S(Q) = 1"), std::string::npos);
}

}  // namespace
}  // namespace rasens
