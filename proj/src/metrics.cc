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

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "ecsp/common.h"
#include "json.hpp"

namespace ecsp {

std::string MetricsReport::ToJson() const {
  nlohmann::ordered_json j;
  j["task"] = task;
  j["precision"] = precision;
  j["recall"] = recall;
  j["f1"] = f1;
  j["true_positives"] = true_positives;
  j["false_positives"] = false_positives;
  j["false_negatives"] = false_negatives;
  j["support"] = support;
  j["excluded"] = excluded;
  j["zero_division"] = zero_division;
  return j.dump();
}

double F1FromPrecisionRecall(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

MetricsReport MicroPrf(std::span<const int> pred, std::span<const int> gold,
                       const std::set<int> &excluded, const std::string &task) {
  ECSP_CHECK(pred.size() == gold.size(),
             "prediction and gold sequences differ in length");
  MetricsReport r;
  r.task = task;
  r.excluded.assign(excluded.begin(), excluded.end());
  for (size_t k = 0; k < pred.size(); ++k) {
    const bool gold_pos = !excluded.count(gold[k]);
    const bool pred_pos = !excluded.count(pred[k]);
    if (gold_pos) ++r.support;
    if (pred[k] == gold[k]) {
      if (gold_pos) ++r.true_positives;
    } else {
      if (pred_pos) ++r.false_positives;
      if (gold_pos) ++r.false_negatives;
    }
  }
  const int64_t pred_total = r.true_positives + r.false_positives;
  const int64_t gold_total = r.true_positives + r.false_negatives;
  if (pred_total > 0) {
    r.precision = 100.0 * static_cast<double>(r.true_positives) /
                  static_cast<double>(pred_total);
  } else {
    r.zero_division = true;
  }
  if (gold_total > 0) {
    r.recall = 100.0 * static_cast<double>(r.true_positives) /
               static_cast<double>(gold_total);
  } else {
    r.zero_division = true;
  }
  r.f1 = F1FromPrecisionRecall(r.precision, r.recall);
  return r;
}

std::string FamilyName(RelationFamily family) {
  switch (family) {
    case RelationFamily::kNone:
      return "none";
    case RelationFamily::kTemporal:
      return "temporal";
    case RelationFamily::kCausal:
      return "causal";
    case RelationFamily::kSubevent:
      return "subevent";
    case RelationFamily::kOther:
      return "other";
  }
  return "other";
}

RelationFamily FamilyOf(const std::string &relation) {
  std::string name = relation;
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  if (name == kNoRelation) return RelationFamily::kNone;
  static const char *const kTemporal[] = {
      "BEFORE",  "AFTER",    "OVERLAP", "CONTAINS", "SIMULTANEOUS",
      "BEGINS-ON", "ENDS-ON", "EQUAL"};
  static const char *const kCausal[] = {"CAUSE", "CAUSEDBY", "PRECONDITION"};
  for (const char *t : kTemporal) {
    if (name == t) return RelationFamily::kTemporal;
  }
  for (const char *c : kCausal) {
    if (name == c) return RelationFamily::kCausal;
  }
  if (name.rfind("SUBEVENT", 0) == 0) return RelationFamily::kSubevent;
  return RelationFamily::kOther;
}

EreRegime ParseEreRegime(const std::string &name) {
  if (name == "+joint" || name == "plus-joint") return EreRegime::kPlusJoint;
  if (name == "all-joint") return EreRegime::kAllJoint;
  throw ConfigError("unknown ERE regime '" + name + "'");
}

std::vector<RelationFamily> FamiliesOf(const LabelSpaces &spaces) {
  std::set<RelationFamily> present;
  for (const std::string &r : spaces.relations()) {
    const RelationFamily f = FamilyOf(r);
    if (f != RelationFamily::kNone) present.insert(f);
  }
  return {present.begin(), present.end()};
}

std::vector<MetricsReport> EreRegimeEval(std::span<const int> pred,
                                         std::span<const int> gold,
                                         const LabelSpaces &spaces,
                                         EreRegime regime) {
  std::vector<MetricsReport> out;
  if (regime == EreRegime::kAllJoint) {
    out.push_back(MicroPrf(pred, gold, {spaces.na_relation()}, "ere/all"));
    return out;
  }
  for (RelationFamily family : FamiliesOf(spaces)) {
    std::set<int> excluded;
    for (int r = 0; r < spaces.num_relations(); ++r) {
      if (FamilyOf(spaces.relations()[r]) != family) excluded.insert(r);
    }
    out.push_back(MicroPrf(pred, gold, excluded, "ere/" + FamilyName(family)));
  }
  return out;
}

std::string FormatReports(const std::vector<MetricsReport> &reports) {
  size_t width = 4;
  for (const MetricsReport &r : reports) width = std::max(width, r.task.size());
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-*s %8s %8s %8s %8s\n",
                static_cast<int>(width), "task", "P", "R", "F1", "support");
  out += line;
  for (const MetricsReport &r : reports) {
    std::snprintf(line, sizeof(line), "%-*s %8.2f %8.2f %8.2f %8lld%s\n",
                  static_cast<int>(width), r.task.c_str(), r.precision,
                  r.recall, r.f1, static_cast<long long>(r.support),
                  r.zero_division ? "  (zero-division)" : "");
    out += line;
  }
  return out;
}

}  // namespace ecsp
