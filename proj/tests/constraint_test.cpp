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

#include "rasens/constraint.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace rasens {
namespace {

using testing::BruteSolutions;
using testing::Gen;
using testing::Q;

TEST(DomainTest, IntIntervalRoundsEndpointsInward) {
  Domain d = Domain::IntInterval(Q(1, 2), Q(7, 2));
  EXPECT_EQ(d.lower(), ExtRational(1));
  EXPECT_EQ(d.upper(), ExtRational(3));
  EXPECT_EQ(*d.Size(), 3);
  EXPECT_TRUE(d.Contains(Rational(2)));
  EXPECT_FALSE(d.Contains(Q(3, 2)));
  EXPECT_FALSE(d.Contains(std::string("2")));
}

TEST(DomainTest, RealIntervalRespectsOpenEnds) {
  Domain d = Domain::RealInterval(0, 1000, true, false);
  EXPECT_FALSE(d.Contains(Rational(0)));
  EXPECT_TRUE(d.Contains(Q(1, 1000)));
  EXPECT_TRUE(d.Contains(Rational(1000)));
  EXPECT_FALSE(d.Size().has_value());
  EXPECT_EQ(d.ToString(), "real (0, 1000]");
}

TEST(DomainTest, EmptyDomainsAreRejected) {
  EXPECT_THROW(Domain::IntInterval(Q(1, 3), Q(2, 3)), Error);
  EXPECT_THROW(Domain::RealInterval(1, 1, true, false), Error);
  EXPECT_THROW(Domain::NumberSet({}), Error);
  EXPECT_THROW(Domain::StringSet({"a", "a"}), Error);
}

TEST(DomainTest, JoinCoversBothOperands) {
  const Domain a = Domain::IntInterval(0, 3);
  const Domain b = Domain::RealInterval(2, 10, false, true);
  const Domain j = Domain::Join(a, b);
  for (int x = 0; x < 10; ++x) EXPECT_TRUE(j.Contains(Rational(x))) << x;
  EXPECT_FALSE(j.Contains(Rational(10)));
  EXPECT_EQ(Domain::Join(Domain::NumberSet({1, 5}), Domain::NumberSet({2})),
            Domain::NumberSet({1, 2, 5}));
  EXPECT_EQ(Domain::Join(Domain::StringSet({"x"}), Domain::StringSet({"y"})),
            Domain::StringSet({"x", "y"}));
  EXPECT_THROW(Domain::Join(a, Domain::StringSet({"x"})), Error);
}

TEST(ConstraintTest, JunctionsFlattenAndSimplify) {
  const Constraint a = Le(Attr("x"), Num(1));
  const Constraint b = Ge(Attr("y"), Num(2));
  EXPECT_TRUE(Constraint::And({}).is_true());
  EXPECT_TRUE(Constraint::Or({}).is_false());
  EXPECT_EQ(Constraint::And({a, Constraint::True()}), a);
  EXPECT_TRUE(Constraint::And({a, Constraint::False()}).is_false());
  EXPECT_TRUE(Constraint::Or({a, Constraint::True()}).is_true());
  const Constraint nested = Conjoin(Conjoin(a, b), a);
  EXPECT_EQ(nested.children().size(), 3u);
}

TEST(ConstraintTest, TypeErrorsAreReportedAtConstruction) {
  EXPECT_THROW(Le(Str("a"), Num(1)), Error);
  EXPECT_THROW(Eq(Str("a"), Num(1)), Error);
  EXPECT_THROW(In(Attr("x"), {Value(Rational(1)), Value(std::string("a"))}), Error);
  EXPECT_THROW(Str("a") + Num(1), Error);
  EXPECT_NO_THROW(Eq(Attr("Name"), Str("Oil")));
}

TEST(ConstraintTest, TypeCheckAgainstSchema) {
  ConstrainedSchema s;
  s.name = "Items";
  s.attributes = {Attribute{"Item", Domain::StringSet({"Oil", "Salt"})},
                  Attribute{"Price", Domain::RealInterval(0, 1000)}};
  EXPECT_NO_THROW(TypeCheck(Le(Attr("Price"), Num(3)), s));
  EXPECT_THROW(TypeCheck(Le(Attr("Item"), Num(3)), s), Error);
  EXPECT_THROW(TypeCheck(Eq(Attr("Item"), Attr("Price")), s), Error);
  EXPECT_THROW(TypeCheck(Le(Attr("Missing"), Num(3)), s), Error);
  EXPECT_THROW(TypeCheck(Eq(Attr("Item") + Num(1), Num(1)), s), Error);
}

TEST(ConstraintTest, ValidateSchemaRejectsDuplicateAttributes) {
  ConstrainedSchema s;
  s.name = "R";
  s.attributes = {Attribute{"A", Domain::IntInterval(0, 1)},
                  Attribute{"A", Domain::IntInterval(0, 1)}};
  EXPECT_THROW(ValidateSchema(s), Error);
}

TEST(ConstraintTest, EvaluatorHandlesArithmeticAndSets) {
  const std::vector<std::string> slots = {"x", "y", "s"};
  const Constraint c = Constraint::And(
      {Le(Attr("x") + Attr("y") * Num(2), Num(10)), In(Attr("s"), {std::string("a")}),
       Constraint::Not(Eq(Attr("x"), Num(3)))});
  const ConstraintEvaluator eval(c, slots);
  EXPECT_TRUE(eval(Tuple{Rational(2), Rational(4), std::string("a")}));
  EXPECT_FALSE(eval(Tuple{Rational(3), Rational(0), std::string("a")}));
  EXPECT_FALSE(eval(Tuple{Rational(2), Rational(5), std::string("a")}));
  EXPECT_FALSE(eval(Tuple{Rational(0), Rational(0), std::string("b")}));
  const ConstraintEvaluator iff(Constraint::Iff(Le(Attr("x"), Num(0)), Le(Attr("y"), Num(0))),
                                slots);
  EXPECT_TRUE(iff(Tuple{Rational(1), Rational(1), std::string("a")}));
  EXPECT_FALSE(iff(Tuple{Rational(-1), Rational(1), std::string("a")}));
}

TEST(ConstraintTest, DomainConstraintMatchesDomainMembership) {
  ConstrainedSchema s;
  s.name = "R";
  s.attributes = {Attribute{"A", Domain::IntInterval(-1, 2)},
                  Attribute{"B", Domain::NumberSet({0, 5})}};
  const ConstraintEvaluator eval(DomainConstraint(s), s.AttributeNames());
  for (int a = -3; a <= 4; ++a) {
    for (int b = -1; b <= 6; ++b) {
      const bool member = a >= -1 && a <= 2 && (b == 0 || b == 5);
      EXPECT_EQ(eval(Tuple{Rational(a), Rational(b)}), member) << a << "," << b;
    }
  }
}

TEST(ConstraintTest, RenameRewritesAttributeReferences) {
  const Constraint c = Conjoin(Le(Attr("A"), Attr("B")), In(Attr("A"), {Value(Rational(1))}));
  const Constraint r = Rename(c, {{"A", "X"}});
  EXPECT_EQ(MentionedAttributes(r), (std::set<std::string>{"B", "X"}));
}

// Property: normalization preserves the solution set.
TEST(ConstraintPropertyTest, NormalizePreservesSolutions) {
  Gen g(11);
  for (int iter = 0; iter < 200; ++iter) {
    ConstrainedSchema s = testing::RandomSchema(g, "R");
    const Constraint c = testing::RandomConstraint(g, s.AttributeNames(), 3);
    EXPECT_EQ(BruteSolutions(c, s), BruteSolutions(Normalize(c), s)) << ToString(c);
  }
}

// Property: composition by conjunction is commutative and associative on
// solution sets, and equals the intersection of the parts.
TEST(ConstraintPropertyTest, ConjoinIsIntersection) {
  Gen g(12);
  for (int iter = 0; iter < 150; ++iter) {
    ConstrainedSchema s = testing::RandomSchema(g, "R");
    const auto names = s.AttributeNames();
    const Constraint a = testing::RandomConstraint(g, names, 2);
    const Constraint b = testing::RandomConstraint(g, names, 2);
    const Constraint c = testing::RandomConstraint(g, names, 2);
    const auto sa = BruteSolutions(a, s);
    const auto sb = BruteSolutions(b, s);
    std::set<Tuple> inter;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                          std::inserter(inter, inter.begin()));
    EXPECT_EQ(BruteSolutions(Conjoin(a, b), s), inter);
    EXPECT_EQ(BruteSolutions(Conjoin(a, b), s), BruteSolutions(Conjoin(b, a), s));
    EXPECT_EQ(BruteSolutions(Conjoin(Conjoin(a, b), c), s),
              BruteSolutions(Conjoin(a, Conjoin(b, c)), s));
  }
}

TEST(ConstraintPrintTest, PrintsInfixWithMinimalParentheses) {
  const Constraint c = Constraint::Or(
      {Constraint::And({Le(Attr("a"), Num(1)), Gt(Attr("b") - (Attr("c") + Num(2)), Num(0))}),
       Constraint::Not(Eq(Attr("s"), Str("x")))});
  EXPECT_EQ(ToString(c), "a <= 1 and b - (c + 2) > 0 or not s = \"x\"");
}

}  // namespace
}  // namespace rasens
