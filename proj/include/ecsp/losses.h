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

// Margin-rescaled structured hinge losses with a cross-entropy companion:
//
//   loss = [cost(pred, gold) - E(x, pred) + E(x, gold)]_+ + mu * CE(pred, gold)
//
// `pred` comes from the level's classifier head and carries gradients;
// `gold` is one-hot.

#ifndef ECSP_LOSSES_H_
#define ECSP_LOSSES_H_

#include <string>

#include "ecsp/common.h"
#include "ecsp/energy.h"

namespace ecsp {

enum class Level { kToken, kSentence, kDocument };

std::string LevelName(Level level);

enum class CostKind {
  kSquaredL2,     // sum of squared differences, differentiable
  kHammingArgmax  // rows whose argmax differs from gold; zero gradient
};

CostKind ParseCostKind(const std::string &name);
std::string CostKindName(CostKind kind);

struct LossWeights {
  double mu_token = 1.0;
  double mu_sentence = 1.0;
  double mu_document = 1.0;
  double lambda_token = 1.0;
  double lambda_sentence = 1.0;
  double lambda_document = 1.0;
  double l2_coeff = 1e-5;

  // Throws ConfigError if any weight is negative or non-finite.
  void Validate() const;
};

double StructuredCost(const Matrix &pred, const Matrix &gold,
                      CostKind kind = CostKind::kSquaredL2);
Matrix StructuredCostGradient(const Matrix &pred, const Matrix &gold,
                              CostKind kind = CostKind::kSquaredL2);

// Mean over rows of -sum_i gold_i log pred_i. Entries with gold_i == 0
// contribute nothing, so CE(gold, gold) == 0 exactly for one-hot gold.
double CrossEntropy(const Matrix &pred, const Matrix &gold);
Matrix CrossEntropyGradient(const Matrix &pred, const Matrix &gold);

struct TokenLevelLoss {
  double hinge = 0.0;
  double ce = 0.0;
  double value = 0.0;  // hinge + mu * ce
  Matrix d_pred;
  Matrix d_features;
  TokenEnergyParams d_params;
};

// One token sequence: features n x d, pred/gold n x (|E|+2).
TokenLevelLoss TokenLevelLossWithGradient(const Matrix &features,
                                          const Matrix &pred,
                                          const Matrix &gold,
                                          const TokenEnergyParams &params,
                                          double mu,
                                          CostKind kind = CostKind::kSquaredL2);

struct LabelLevelLoss {
  double hinge = 0.0;
  double ce = 0.0;
  double value = 0.0;
  Vector d_pred;
  Vector d_feature;
  LabelEnergyParams d_params;
};

// One mention (sentence level) or one mention pair (document level).
LabelLevelLoss LabelLevelLossWithGradient(const Vector &feature,
                                          const Vector &pred,
                                          const Vector &gold,
                                          const LabelEnergyParams &params,
                                          double mu,
                                          CostKind kind = CostKind::kSquaredL2);

// Level-dispatching value of one instance's loss. For the sentence and
// document levels `inputs`, `pred` and `gold` are single-row matrices.
double HingeLossLevel(Level level, const Matrix &inputs, const Matrix &pred,
                      const Matrix &gold, const EnergyParams &params,
                      double mu, CostKind kind = CostKind::kSquaredL2);

// One-hot row vector.
Vector OneHot(int index, int size);

}  // namespace ecsp

#endif  // ECSP_LOSSES_H_
