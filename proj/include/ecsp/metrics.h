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

// Micro precision / recall / F1 with excluded "negative" labels.

#ifndef ECSP_METRICS_H_
#define ECSP_METRICS_H_

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ecsp/corpus.h"

namespace ecsp {

struct MetricsReport {
  std::string task;
  // Percentages in [0, 100].
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int64_t true_positives = 0;
  int64_t false_positives = 0;
  int64_t false_negatives = 0;
  int64_t support = 0;  // instances whose gold label is not excluded
  std::vector<int> excluded;
  // Set when a ratio had a zero denominator and was reported as 0.
  bool zero_division = false;

  std::string ToJson() const;
  bool operator==(const MetricsReport &other) const = default;
};

// Harmonic mean of percentages; 0 when p + r == 0.
double F1FromPrecisionRecall(double precision, double recall);

// Pools TP/FP/FN over all labels outside `excluded`:
//   TP: gold == pred, gold not excluded
//   FP: pred != gold, pred not excluded
//   FN: pred != gold, gold not excluded
// Throws ContractError when the sequences differ in length.
MetricsReport MicroPrf(std::span<const int> pred, std::span<const int> gold,
                       const std::set<int> &excluded,
                       const std::string &task = "");

// Relation families for grouped evaluation.
enum class RelationFamily { kNone, kTemporal, kCausal, kSubevent, kOther };

std::string FamilyName(RelationFamily family);
RelationFamily FamilyOf(const std::string &relation);

enum class EreRegime {
  kPlusJoint,  // one report per relation family
  kAllJoint,   // one pooled report over every non-NA relation
};

EreRegime ParseEreRegime(const std::string &name);

// Families present among the non-NA labels, in enum order.
std::vector<RelationFamily> FamiliesOf(const LabelSpaces &spaces);

std::vector<MetricsReport> EreRegimeEval(std::span<const int> pred,
                                         std::span<const int> gold,
                                         const LabelSpaces &spaces,
                                         EreRegime regime);

// Aligned text table: task, P, R, F1, support.
std::string FormatReports(const std::vector<MetricsReport> &reports);

}  // namespace ecsp

#endif  // ECSP_METRICS_H_
