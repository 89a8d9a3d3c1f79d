// Copyright 2026 The ECSP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ecsp/metrics.h"

#include <gtest/gtest.h>

#include "ecsp/common.h"
#include "ecsp/corpus.h"

namespace ecsp {
namespace {

TEST(MicroPrfTest, PerfectPredictionIsHundred) {
  const std::vector<int> gold = {0, 1, 2, 2, 1};
  const MetricsReport r = MicroPrf(gold, gold, {0}, "t");
  EXPECT_DOUBLE_EQ(r.precision, 100.0);
  EXPECT_DOUBLE_EQ(r.recall, 100.0);
  EXPECT_DOUBLE_EQ(r.f1, 100.0);
  EXPECT_EQ(r.support, 4);
  EXPECT_FALSE(r.zero_division);
}

TEST(MicroPrfTest, EmptyGoldIsZeroWithFlag) {
  const MetricsReport empty = MicroPrf({}, {}, {0}, "t");
  EXPECT_EQ(empty.f1, 0.0);
  EXPECT_TRUE(empty.zero_division);
  // Only excluded labels everywhere.
  const std::vector<int> all_na = {0, 0, 0};
  const MetricsReport na = MicroPrf(all_na, all_na, {0}, "t");
  EXPECT_EQ(na.precision, 0.0);
  EXPECT_EQ(na.recall, 0.0);
  EXPECT_TRUE(na.zero_division);
}

TEST(MicroPrfTest, HandScoredFixture) {
  // Label 0 excluded.
  //   gold 1 pred 1 -> TP
  //   gold 1 pred 2 -> FP + FN
  //   gold 0 pred 2 -> FP
  //   gold 2 pred 0 -> FN
  //   gold 2 pred 2 -> TP
  //   gold 0 pred 0 -> nothing
  const std::vector<int> gold = {1, 1, 0, 2, 2, 0};
  const std::vector<int> pred = {1, 2, 2, 0, 2, 0};
  const MetricsReport r = MicroPrf(pred, gold, {0}, "t");
  EXPECT_EQ(r.true_positives, 2);
  EXPECT_EQ(r.false_positives, 2);
  EXPECT_EQ(r.false_negatives, 2);
  EXPECT_DOUBLE_EQ(r.precision, 50.0);
  EXPECT_DOUBLE_EQ(r.recall, 50.0);
  EXPECT_DOUBLE_EQ(r.f1, 50.0);
}

TEST(MicroPrfTest, CorrectExcludedInstanceChangesNothing) {
  std::vector<int> gold = {1, 2, 0, 1};
  std::vector<int> pred = {1, 1, 2, 0};
  const MetricsReport before = MicroPrf(pred, gold, {0}, "t");
  gold.push_back(0);
  pred.push_back(0);
  const MetricsReport after = MicroPrf(pred, gold, {0}, "t");
  EXPECT_EQ(before.ToJson(), after.ToJson());
}

TEST(MicroPrfTest, LengthMismatchIsContractError) {
  EXPECT_THROW(MicroPrf(std::vector<int>{1}, std::vector<int>{}, {}, "t"),
               ContractError);
}

TEST(F1Test, HarmonicMean) {
  EXPECT_NEAR(F1FromPrecisionRecall(78.82, 79.37), 79.09, 0.01);
  EXPECT_EQ(F1FromPrecisionRecall(0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(F1FromPrecisionRecall(50.0, 100.0), 200.0 / 3.0);
}

TEST(FamilyTest, Classification) {
  EXPECT_EQ(FamilyOf("BEFORE"), RelationFamily::kTemporal);
  EXPECT_EQ(FamilyOf("simultaneous"), RelationFamily::kTemporal);
  EXPECT_EQ(FamilyOf("CAUSE"), RelationFamily::kCausal);
  EXPECT_EQ(FamilyOf("CAUSEDBY"), RelationFamily::kCausal);
  EXPECT_EQ(FamilyOf("PRECONDITION"), RelationFamily::kCausal);
  EXPECT_EQ(FamilyOf("SUBEVENT"), RelationFamily::kSubevent);
  EXPECT_EQ(FamilyOf("NA"), RelationFamily::kNone);
  EXPECT_EQ(FamilyOf("COREFERENCE"), RelationFamily::kOther);
}

TEST(EreRegimeTest, PlusJointScoresEachFamilyAlone) {
  const LabelSpaces s({"None"}, {"NA", "BEFORE", "CAUSE", "SUBEVENT"});
  const std::vector<int> gold = {1, 1, 2, 3, 0};
  const std::vector<int> pred = {1, 2, 2, 0, 3};
  const auto reports = EreRegimeEval(pred, gold, s, EreRegime::kPlusJoint);
  ASSERT_EQ(reports.size(), 3u);
  EXPECT_EQ(reports[0].task, "ere/temporal");
  // Temporal: gold BEFORE twice, one right; the CAUSE guess is excluded.
  EXPECT_EQ(reports[0].true_positives, 1);
  EXPECT_EQ(reports[0].false_positives, 0);
  EXPECT_EQ(reports[0].false_negatives, 1);
  EXPECT_EQ(reports[1].task, "ere/causal");
  EXPECT_EQ(reports[1].true_positives, 1);
  EXPECT_EQ(reports[1].false_positives, 1);
  EXPECT_EQ(reports[2].task, "ere/subevent");
  EXPECT_EQ(reports[2].false_negatives, 1);
  EXPECT_EQ(reports[2].false_positives, 1);

  const auto all = EreRegimeEval(pred, gold, s, EreRegime::kAllJoint);
  ASSERT_EQ(all.size(), 1u);
  EXPECT_EQ(all[0].ToJson(), MicroPrf(pred, gold, {0}, "ere/all").ToJson());
  EXPECT_EQ(ParseEreRegime("+joint"), EreRegime::kPlusJoint);
  EXPECT_THROW(ParseEreRegime("joint"), ConfigError);
}

TEST(FormatReportsTest, HasHeaderAndRows) {
  const std::string out =
      FormatReports({MicroPrf(std::vector<int>{1}, std::vector<int>{1}, {}, "x")});
  EXPECT_NE(out.find("F1"), std::string::npos);
  EXPECT_NE(out.find("100.00"), std::string::npos);
}

}  // namespace
}  // namespace ecsp
