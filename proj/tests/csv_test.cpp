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

#include "rasens/csv.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace rasens {
namespace {

using testing::ParseSchema;
using testing::Q;

TEST(ParseCsvTest, QuotingAndLineNumbers) {
  const auto recs = ParseCsv("a,b\n\"x, y\",\"he said \"\"hi\"\"\"\n\n\"multi\nline\",2\r\n3,4");
  ASSERT_EQ(recs.size(), 4u);
  EXPECT_EQ(recs[1].fields, (std::vector<std::string>{"x, y", "he said \"hi\""}));
  EXPECT_EQ(recs[1].line, 2);
  EXPECT_EQ(recs[2].fields[0], "multi\nline");
  EXPECT_EQ(recs[2].line, 4);
  EXPECT_EQ(recs[3].line, 6);
  EXPECT_EQ(recs[3].fields, (std::vector<std::string>{"3", "4"}));
}

TEST(ParseCsvTest, MalformedQuotes) {
  EXPECT_THROW(ParseCsv("a\n\"open"), SyntaxError);
  EXPECT_THROW(ParseCsv("a\n\"x\"y\n"), SyntaxError);
}

class LoadRelationTest : public ::testing::Test {
 protected:
  ConstrainedSchema items_ = ParseSchema(
      "relation Items { Item: string in {\"Oil\", \"Salt\", \"a,b\"}; Price: real [0, 1000]; "
      "Cost: real (0, 1000] } check { Cost <= Price }");
};

TEST_F(LoadRelationTest, ParsesTypedValuesAndDeduplicates) {
  const Relation r =
      LoadRelation("Item,Price,Cost\nOil,12.5,10\nSalt,3/2,1\nOil,12.5,10\n", items_);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_TRUE(r.Contains(Tuple{std::string("Salt"), Q(3, 2), Rational(1)}));
  EXPECT_TRUE(r.Contains(Tuple{std::string("Oil"), Q(25, 2), Rational(10)}));
}

TEST_F(LoadRelationTest, ReportsEveryBadRowWithItsLine) {
  try {
    LoadRelation("Item,Price,Cost\nOil,5,10\nSalt,x,1\nOil,5,4\nSugar,1,1\nOil,1\n", items_);
    FAIL();
  } catch (const DataError& e) {
    ASSERT_EQ(e.rows().size(), 4u);
    EXPECT_NE(e.rows()[0].find("line 2"), std::string::npos);
    EXPECT_NE(e.rows()[0].find("check"), std::string::npos);
    EXPECT_NE(e.rows()[1].find("line 3"), std::string::npos);
    EXPECT_NE(e.rows()[1].find("not a number"), std::string::npos);
    EXPECT_NE(e.rows()[2].find("line 5"), std::string::npos);
    EXPECT_NE(e.rows()[2].find("outside domain"), std::string::npos);
    EXPECT_NE(e.rows()[3].find("line 6"), std::string::npos);
    EXPECT_EQ(e.kind(), ErrorKind::kData);
  }
}

TEST_F(LoadRelationTest, HeaderMustMatchSchema) {
  EXPECT_THROW(LoadRelation("Item,Cost,Price\n", items_), DataError);
  EXPECT_THROW(LoadRelation("", items_), DataError);
  EXPECT_NO_THROW(LoadRelation("Item,Price,Cost\n", items_));
}

TEST_F(LoadRelationTest, SampleItemsFileIsRejected) {
  const Catalog cat = MakeCatalog(ParseSchemas(testing::ReadSample("people.schema")));
  EXPECT_NO_THROW(LoadRelation(testing::ReadSample("items.csv"), cat.at("Items")));
  try {
    LoadRelation(testing::ReadSample("items_bad.csv"), cat.at("Items"));
    FAIL();
  } catch (const DataError& e) {
    EXPECT_EQ(e.rows().size(), 2u);
  }
}

// Property: writing then reading a relation gives it back.
TEST_F(LoadRelationTest, ToCsvRoundTrip) {
  testing::Gen g(8);
  const std::vector<std::string> names = {"Oil", "Salt", "a,b"};
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<Tuple> rows;
    const int n = testing::Uniform(g, 0, 6);
    for (int k = 0; k < n; ++k) {
      const Rational cost = Q(testing::Uniform(g, 1, 40), testing::Uniform(g, 1, 8));
      rows.push_back({std::string(testing::Pick(g, names)), cost + testing::Uniform(g, 0, 5),
                      cost});
    }
    const Relation r = Relation::Make(items_.AttributeNames(), rows);
    EXPECT_EQ(LoadRelation(ToCsv(r), items_), r) << ToCsv(r);
  }
}

}  // namespace
}  // namespace rasens
