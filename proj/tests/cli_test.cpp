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

#include "rasens/cli.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "test_support.hpp"

namespace rasens {
namespace {

using testing::SamplePath;

struct Result {
  int code;
  std::string out;
  std::string err;
  nlohmann::json json() const { return nlohmann::json::parse(out); }
};

// Sample-relative arguments: "@name" expands to the sample path, and
// "REL=@file" to "REL=<sample path>".
Result Cli(std::vector<std::string> args) {
  for (auto& a : args) {
    const size_t at = a.find('@');
    if (at != std::string::npos) a = a.substr(0, at) + SamplePath(a.substr(at + 1));
  }
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(CliAnalyzeTest, JsonAndTable) {
  Result r = Cli({"analyze", "--schema", "@weight_height.schema", "--query", "@avg_weight.raq"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["gs"], "75");

  r = Cli({"analyze", "--schema", "@weight_height.schema", "--query", "@avg_weight_filtered.raq",
           "--format", "table"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("GS = 50"), std::string::npos);
}

TEST(CliAnalyzeTest, UnboundedExitsThree) {
  const Result r =
      Cli({"analyze", "--schema", "@weight_height.schema", "--query", "@unbounded_product.raq"});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(r.json()["gs"], "inf");
}

TEST(CliAnalyzeTest, InputErrorsExitTwo) {
  EXPECT_EQ(Cli({"analyze", "--schema", "@small.schema", "--expr", "count of T union"}).code, 2);
  EXPECT_EQ(Cli({"analyze", "--schema", "@small.schema", "--expr", "count of Nope"}).code, 2);
  EXPECT_EQ(Cli({"analyze", "--schema", "@no_such.schema", "--expr", "count of T"}).code, 2);
  EXPECT_EQ(Cli({"analyze", "--expr", "count of T"}).code, 2);
  EXPECT_EQ(Cli({"analyze", "--schema", "@small.schema", "--expr", "count of T",
                 "--delta-override", "union=x"})
                .code,
            2);
  EXPECT_EQ(Cli({"frobnicate"}).code, 2);
  EXPECT_EQ(Cli({"--help"}).code, 0);
}

TEST(CliRunTest, SampleTables) {
  struct Case {
    const char* query;
    std::vector<std::string> data;
    const char* value;
  };
  const std::vector<Case> cases = {
      {"@select_count.raq", {"People=@people_select.csv"}, "2"},
      {"@project_count.raq", {"Owners=@owners.csv"}, "2"},
      {"@product_count.raq", {"People=@people_product.csv", "Cars=@cars.csv"}, "4"},
      {"@group_count.raq", {"Drivers=@drivers.csv"}, "3"},
      {"@empty_sum.raq", {"Items=@items.csv"}, "0"},
  };
  for (const auto& c : cases) {
    std::vector<std::string> args = {"run", "--schema", "@people.schema", "--query", c.query};
    for (const auto& d : c.data) {
      args.push_back("--data");
      args.push_back(d);
    }
    const Result r = Cli(args);
    ASSERT_EQ(r.code, 0) << c.query << ": " << r.err;
    EXPECT_EQ(r.json()["value"], c.value) << c.query;
  }
}

TEST(CliRunTest, TraceShowsGroupRows) {
  const Result r = Cli({"run", "--schema", "@people.schema", "--query", "@group_count.raq",
                        "--data", "Drivers=@drivers.csv", "--trace"});
  ASSERT_EQ(r.code, 0) << r.err;
  const nlohmann::json root = r.json()["trace"][0];
  EXPECT_EQ(root["row_count"], 3);
  EXPECT_EQ(root["rows"], nlohmann::json::parse(
                              R"([["Fiat", 1, 180], ["Ford", 2, 165], ["Renault", 1, 165]])"));
}

TEST(CliRunTest, BadDataListsEveryRow) {
  const Result r = Cli({"run", "--schema", "@people.schema", "--query", "@empty_sum.raq",
                        "--data", "Items=@items_bad.csv"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("line 4"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("items_bad.csv"), std::string::npos) << r.err;
}

TEST(CliRunTest, MissingDataForReferencedRelation) {
  EXPECT_EQ(Cli({"run", "--schema", "@people.schema", "--query", "@product_count.raq", "--data",
                 "People=@people_product.csv"})
                .code,
            2);
}

TEST(CliDpRunTest, DeterministicPerSeed) {
  const std::vector<std::string> args = {"dp-run",   "--schema", "@weight_height.schema",
                                         "--query",  "@avg_weight.raq",
                                         "--data",   "R=@weight_height.csv",
                                         "--epsilon", "0.5",     "--seed", "9"};
  const Result a = Cli(args);
  const Result b = Cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const nlohmann::json j = a.json();
  EXPECT_EQ(j["scale"], 150.0);
  EXPECT_EQ(j["seed"], 9);
  EXPECT_FALSE(j.contains("value"));

  std::vector<std::string> many = args;
  many.insert(many.end(), {"--samples", "5"});
  const Result m = Cli(many);
  ASSERT_EQ(m.code, 0) << m.err;
  EXPECT_EQ(m.json()["samples"].size(), 5u);
}

TEST(CliDpRunTest, RefusesUnboundedAndBadEpsilon) {
  EXPECT_EQ(Cli({"dp-run", "--schema", "@weight_height.schema", "--query",
                 "@unbounded_product.raq", "--data", "R=@weight_height.csv", "--epsilon", "1"})
                .code,
            3);
  EXPECT_EQ(Cli({"dp-run", "--schema", "@weight_height.schema", "--query", "@avg_weight.raq",
                 "--data", "R=@weight_height.csv", "--epsilon", "-1"})
                .code,
            2);
}

TEST(CliValidateTest, Verdicts) {
  Result r = Cli({"validate", "--schema", "@small.schema", "--query", "@sum_select.raq"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["verdict"], "STRICT");
  EXPECT_EQ(r.json()["oracle"], "50");

  r = Cli({"validate", "--schema", "@small.schema", "--query", "@count_project.raq"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["verdict"], "STRICT");

  r = Cli({"validate", "--schema", "@small.schema", "--query", "@count_union.raq",
           "--delta-override", "union=1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.json()["verdict"], "VIOLATION");

  r = Cli({"validate", "--schema", "@weight_height.schema", "--query", "@avg_weight.raq"});
  EXPECT_EQ(r.code, 4);
  r = Cli({"validate", "--schema", "@small.schema", "--query", "@count_union.raq",
           "--oracle-cap", "2"});
  EXPECT_EQ(r.code, 4);
}

}  // namespace
}  // namespace rasens
