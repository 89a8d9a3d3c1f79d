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

#include "ecsp/energy.h"

#include <algorithm>
#include <functional>

#include "ecsp/rng.h"

namespace ecsp {

TokenEnergyParams TokenEnergyParams::ZerosLike() const {
  return {Matrix::Zero(local.rows(), local.cols()),
          Matrix::Zero(transition.rows(), transition.cols())};
}

LabelEnergyParams LabelEnergyParams::ZerosLike() const {
  return {Matrix::Zero(local.rows(), local.cols()),
          Vector::Zero(label_weights.size()),
          Matrix::Zero(interaction.rows(), interaction.cols())};
}

EnergyParams EnergyParams::Init(int n_classes, int n_relations, int dim,
                                uint64_t seed, double scale) {
  Rng rng(seed);
  auto random = [&](int rows, int cols) {
    Matrix m(rows, cols);
    for (int c = 0; c < cols; ++c) {
      for (int r = 0; r < rows; ++r) m(r, c) = scale * rng.Normal();
    }
    return m;
  };
  const int k = n_classes + 2;
  EnergyParams p;
  p.token = {random(k, dim), random(k, k)};
  p.sentence = {random(n_classes, dim), random(n_classes, 1).col(0),
                random(n_classes, n_classes)};
  p.document = {random(n_relations, 3 * dim), random(n_relations, 1).col(0),
                random(n_relations, n_relations)};
  return p;
}

EnergyParams EnergyParams::ZerosLike() const {
  return {token.ZerosLike(), sentence.ZerosLike(), document.ZerosLike()};
}

namespace {

void CheckTokenShapes(const Matrix &features, const Matrix &labels,
                      const TokenEnergyParams &params) {
  ECSP_CHECK(features.rows() == labels.rows(),
             "token features and labels differ in length");
  ECSP_CHECK(features.cols() == params.local.cols(),
             "token feature dimension mismatch");
  ECSP_CHECK(labels.cols() == params.num_labels(),
             "token label dimension mismatch");
  ECSP_CHECK(params.transition.rows() == params.num_labels() &&
                 params.transition.cols() == params.num_labels(),
             "token transition matrix shape mismatch");
}

void CheckLabelShapes(const Vector &feature, const Vector &labels,
                      const LabelEnergyParams &params) {
  ECSP_CHECK(feature.size() == params.local.cols(),
             "energy feature dimension mismatch");
  ECSP_CHECK(labels.size() == params.num_labels(),
             "energy label dimension mismatch");
  ECSP_CHECK(params.label_weights.size() == params.num_labels() &&
                 params.interaction.rows() == params.num_labels() &&
                 params.interaction.cols() == params.num_labels(),
             "label energy parameter shape mismatch");
}

Vector PaddingOneHot(int k) {
  Vector v = Vector::Zero(k);
  v(k - 1) = 1.0;
  return v;
}

}  // namespace

double TokenEnergy(const Matrix &features, const Matrix &labels,
                   const TokenEnergyParams &params) {
  CheckTokenShapes(features, labels, params);
  const Matrix scores = features * params.local.transpose();  // n x K
  double local = labels.cwiseProduct(scores).sum();
  double pairwise = 0.0;
  Vector prev = PaddingOneHot(params.num_labels());
  for (Eigen::Index n = 0; n < labels.rows(); ++n) {
    const Vector cur = labels.row(n).transpose();
    pairwise += prev.dot(params.transition * cur);
    prev = cur;
  }
  return -(local + pairwise);
}

TokenEnergyGradient TokenEnergyWithGradient(const Matrix &features,
                                            const Matrix &labels,
                                            const TokenEnergyParams &params) {
  TokenEnergyGradient g;
  g.energy = TokenEnergy(features, labels, params);
  const Eigen::Index n = labels.rows();
  const Matrix &w = params.transition;
  g.d_features = -labels * params.local;
  g.d_labels = -(features * params.local.transpose());
  g.d_params.local = -labels.transpose() * features;
  g.d_params.transition = Matrix::Zero(w.rows(), w.cols());
  Vector prev = PaddingOneHot(params.num_labels());
  for (Eigen::Index k = 0; k < n; ++k) {
    const Vector cur = labels.row(k).transpose();
    // term prev' W cur
    g.d_labels.row(k) -= (w.transpose() * prev).transpose();
    if (k > 0) g.d_labels.row(k - 1) -= (w * cur).transpose();
    g.d_params.transition -= prev * cur.transpose();
    prev = cur;
  }
  return g;
}

double LabelEnergy(const Vector &feature, const Vector &labels,
                   const LabelEnergyParams &params) {
  CheckLabelShapes(feature, labels, params);
  const double local = labels.dot(params.local * feature);
  const Vector u = params.interaction * labels;
  double label = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    label += params.label_weights(i) * Softplus(u(i));
  }
  return -(local + label);
}

LabelEnergyGradient LabelEnergyWithGradient(const Vector &feature,
                                            const Vector &labels,
                                            const LabelEnergyParams &params) {
  LabelEnergyGradient g;
  g.energy = LabelEnergy(feature, labels, params);
  const Vector u = params.interaction * labels;
  Vector soft(u.size()), gate(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    soft(i) = Softplus(u(i));
    gate(i) = params.label_weights(i) * Sigmoid(u(i));
  }
  g.d_feature = -params.local.transpose() * labels;
  g.d_labels = -(params.local * feature) - params.interaction.transpose() * gate;
  g.d_params.local = -labels * feature.transpose();
  g.d_params.label_weights = -soft;
  g.d_params.interaction = -gate * labels.transpose();
  return g;
}

Vector ProjectToSimplex(const Vector &v) {
  const Eigen::Index n = v.size();
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0, theta = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumulative += sorted[k];
    const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

namespace {

using EnergyFn = std::function<double(const Matrix &, Matrix *)>;

EnergyMinimization Minimize(const EnergyFn &energy, Eigen::Index rows,
                            Eigen::Index cols, int steps, double step_size) {
  ECSP_CHECK(steps >= 1, "energy minimization needs at least one step");
  ECSP_CHECK(step_size > 0.0, "step size must be positive");
  EnergyMinimization out;
  Matrix y = Matrix::Constant(rows, cols, 1.0 / static_cast<double>(cols));
  Matrix grad;
  double e = energy(y, &grad);
  out.trace.push_back(e);
  double eta = step_size;
  for (int s = 0; s < steps; ++s) {
    Matrix cand(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      cand.row(r) = ProjectToSimplex((y.row(r) - eta * grad.row(r)).transpose())
                        .transpose();
    }
    Matrix cand_grad;
    const double ce = energy(cand, &cand_grad);
    if (ce < e) {
      y = std::move(cand);
      grad = std::move(cand_grad);
      e = ce;
      out.trace.push_back(e);
      eta *= 1.5;
    } else {
      eta *= 0.5;
      if (eta < 1e-12) break;
    }
  }
  out.labels = std::move(y);
  out.energy = e;
  return out;
}

}  // namespace

EnergyMinimization MinimizeTokenEnergy(const Matrix &features,
                                       const TokenEnergyParams &params,
                                       int steps, double step_size) {
  auto fn = [&](const Matrix &y, Matrix *grad) {
    TokenEnergyGradient g = TokenEnergyWithGradient(features, y, params);
    *grad = std::move(g.d_labels);
    return g.energy;
  };
  return Minimize(fn, features.rows(), params.num_labels(), steps, step_size);
}

EnergyMinimization MinimizeLabelEnergy(const Vector &feature,
                                       const LabelEnergyParams &params,
                                       int steps, double step_size) {
  auto fn = [&](const Matrix &y, Matrix *grad) {
    LabelEnergyGradient g =
        LabelEnergyWithGradient(feature, y.row(0).transpose(), params);
    *grad = g.d_labels.transpose();
    return g.energy;
  };
  return Minimize(fn, 1, params.num_labels(), steps, step_size);
}

}  // namespace ecsp
