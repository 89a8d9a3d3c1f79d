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

#include "ecsp/losses.h"

#include <algorithm>
#include <cmath>

namespace ecsp {

namespace {
constexpr double kProbFloor = 1e-12;
}

std::string LevelName(Level level) {
  switch (level) {
    case Level::kToken:
      return "token";
    case Level::kSentence:
      return "sentence";
    case Level::kDocument:
      return "document";
  }
  return "?";
}

CostKind ParseCostKind(const std::string &name) {
  if (name == "squared-l2") return CostKind::kSquaredL2;
  if (name == "hamming") return CostKind::kHammingArgmax;
  throw ConfigError("unknown structured cost '" + name + "'");
}

std::string CostKindName(CostKind kind) {
  return kind == CostKind::kSquaredL2 ? "squared-l2" : "hamming";
}

void LossWeights::Validate() const {
  for (double w : {mu_token, mu_sentence, mu_document, lambda_token,
                   lambda_sentence, lambda_document, l2_coeff}) {
    if (!std::isfinite(w) || w < 0.0) {
      throw ConfigError("loss weights must be finite and nonnegative");
    }
  }
}

Vector OneHot(int index, int size) {
  ECSP_CHECK(index >= 0 && index < size, "one-hot index out of range");
  Vector v = Vector::Zero(size);
  v(index) = 1.0;
  return v;
}

double StructuredCost(const Matrix &pred, const Matrix &gold, CostKind kind) {
  ECSP_CHECK(pred.rows() == gold.rows() && pred.cols() == gold.cols(),
             "structured cost shape mismatch");
  if (kind == CostKind::kSquaredL2) return (pred - gold).squaredNorm();
  double wrong = 0.0;
  for (Eigen::Index r = 0; r < pred.rows(); ++r) {
    Eigen::Index p, g;
    pred.row(r).maxCoeff(&p);
    gold.row(r).maxCoeff(&g);
    if (p != g) wrong += 1.0;
  }
  return wrong;
}

Matrix StructuredCostGradient(const Matrix &pred, const Matrix &gold,
                              CostKind kind) {
  ECSP_CHECK(pred.rows() == gold.rows() && pred.cols() == gold.cols(),
             "structured cost shape mismatch");
  if (kind == CostKind::kSquaredL2) return 2.0 * (pred - gold);
  return Matrix::Zero(pred.rows(), pred.cols());
}

double CrossEntropy(const Matrix &pred, const Matrix &gold) {
  ECSP_CHECK(pred.rows() == gold.rows() && pred.cols() == gold.cols(),
             "cross-entropy shape mismatch");
  if (pred.rows() == 0) return 0.0;
  double total = 0.0;
  for (Eigen::Index r = 0; r < pred.rows(); ++r) {
    for (Eigen::Index c = 0; c < pred.cols(); ++c) {
      if (gold(r, c) == 0.0) continue;
      total -= gold(r, c) * std::log(std::max(pred(r, c), kProbFloor));
    }
  }
  return total / static_cast<double>(pred.rows());
}

Matrix CrossEntropyGradient(const Matrix &pred, const Matrix &gold) {
  Matrix g = Matrix::Zero(pred.rows(), pred.cols());
  if (pred.rows() == 0) return g;
  const double scale = 1.0 / static_cast<double>(pred.rows());
  for (Eigen::Index r = 0; r < pred.rows(); ++r) {
    for (Eigen::Index c = 0; c < pred.cols(); ++c) {
      if (gold(r, c) == 0.0 || pred(r, c) < kProbFloor) continue;
      g(r, c) = -scale * gold(r, c) / pred(r, c);
    }
  }
  return g;
}

TokenLevelLoss TokenLevelLossWithGradient(const Matrix &features,
                                          const Matrix &pred,
                                          const Matrix &gold,
                                          const TokenEnergyParams &params,
                                          double mu, CostKind kind) {
  TokenEnergyGradient ep = TokenEnergyWithGradient(features, pred, params);
  TokenEnergyGradient eg = TokenEnergyWithGradient(features, gold, params);
  TokenLevelLoss out;
  const double margin = StructuredCost(pred, gold, kind) - ep.energy + eg.energy;
  out.hinge = std::max(0.0, margin);
  out.ce = CrossEntropy(pred, gold);
  out.value = out.hinge + mu * out.ce;
  out.d_pred = mu * CrossEntropyGradient(pred, gold);
  if (margin > 0.0) {
    out.d_pred += StructuredCostGradient(pred, gold, kind) - ep.d_labels;
    out.d_features = eg.d_features - ep.d_features;
    out.d_params.local = eg.d_params.local - ep.d_params.local;
    out.d_params.transition = eg.d_params.transition - ep.d_params.transition;
  } else {
    out.d_features = Matrix::Zero(features.rows(), features.cols());
    out.d_params = params.ZerosLike();
  }
  return out;
}

LabelLevelLoss LabelLevelLossWithGradient(const Vector &feature,
                                          const Vector &pred,
                                          const Vector &gold,
                                          const LabelEnergyParams &params,
                                          double mu, CostKind kind) {
  LabelEnergyGradient ep = LabelEnergyWithGradient(feature, pred, params);
  LabelEnergyGradient eg = LabelEnergyWithGradient(feature, gold, params);
  const Matrix p = pred.transpose(), g = gold.transpose();
  LabelLevelLoss out;
  const double margin = StructuredCost(p, g, kind) - ep.energy + eg.energy;
  out.hinge = std::max(0.0, margin);
  out.ce = CrossEntropy(p, g);
  out.value = out.hinge + mu * out.ce;
  out.d_pred = mu * CrossEntropyGradient(p, g).transpose();
  if (margin > 0.0) {
    out.d_pred +=
        Vector(StructuredCostGradient(p, g, kind).transpose()) - ep.d_labels;
    out.d_feature = eg.d_feature - ep.d_feature;
    out.d_params.local = eg.d_params.local - ep.d_params.local;
    out.d_params.label_weights =
        eg.d_params.label_weights - ep.d_params.label_weights;
    out.d_params.interaction =
        eg.d_params.interaction - ep.d_params.interaction;
  } else {
    out.d_feature = Vector::Zero(feature.size());
    out.d_params = params.ZerosLike();
  }
  return out;
}

double HingeLossLevel(Level level, const Matrix &inputs, const Matrix &pred,
                      const Matrix &gold, const EnergyParams &params,
                      double mu, CostKind kind) {
  if (level == Level::kToken) {
    return TokenLevelLossWithGradient(inputs, pred, gold, params.token, mu,
                                      kind)
        .value;
  }
  ECSP_CHECK(inputs.rows() == 1 && pred.rows() == 1 && gold.rows() == 1,
             "sentence/document instances are single rows");
  const LabelEnergyParams &p =
      level == Level::kSentence ? params.sentence : params.document;
  return LabelLevelLossWithGradient(inputs.row(0).transpose(),
                                    pred.row(0).transpose(),
                                    gold.row(0).transpose(), p, mu, kind)
      .value;
}

}  // namespace ecsp
