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

// Energy functions over (input, label) pairs. Lower energy means a more
// compatible pair. Every energy is the negated sum of a local term, linear in
// the labels, and a label-interaction term.
//
//   token:     E(x, y) = -( sum_n sum_i y_n[i] V_i.f1(x_n)
//                           + sum_n y_{n-1}' W y_n ),  y_0 = padding one-hot
//   sentence:  E(X, Y) = -( sum_i Y_i V_i.f2(X) + w' softplus(W Y) )
//   document:  E(P, z) = -( sum_i z_i V_i.f3(P) + w' softplus(W z) )
//
// Labels may be relaxed (rows on the probability simplex) or one-hot.

#ifndef ECSP_ENERGY_H_
#define ECSP_ENERGY_H_

#include <cstdint>
#include <vector>

#include "ecsp/common.h"

namespace ecsp {

struct TokenEnergyParams {
  Matrix local;       // (|E|+2) x d
  Matrix transition;  // (|E|+2) x (|E|+2)

  int num_labels() const { return static_cast<int>(local.rows()); }
  TokenEnergyParams ZerosLike() const;
};

// Parameters of the sentence- and document-level energies.
struct LabelEnergyParams {
  Matrix local;          // K x input_dim
  Vector label_weights;  // K
  Matrix interaction;    // K x K

  int num_labels() const { return static_cast<int>(local.rows()); }
  LabelEnergyParams ZerosLike() const;
};

struct EnergyParams {
  TokenEnergyParams token;
  LabelEnergyParams sentence;  // input dim d
  LabelEnergyParams document;  // input dim 3d

  static EnergyParams Init(int n_classes, int n_relations, int dim,
                           uint64_t seed, double scale = 0.1);
  EnergyParams ZerosLike() const;
};

// Token-level energy. `labels` is n x (|E|+2); the label preceding row 0 is
// the padding one-hot (last label).
double TokenEnergy(const Matrix &features, const Matrix &labels,
                   const TokenEnergyParams &params);

struct TokenEnergyGradient {
  double energy = 0.0;
  Matrix d_features;
  Matrix d_labels;
  TokenEnergyParams d_params;
};

TokenEnergyGradient TokenEnergyWithGradient(const Matrix &features,
                                            const Matrix &labels,
                                            const TokenEnergyParams &params);

// Shared form of the sentence and document energies.
double LabelEnergy(const Vector &feature, const Vector &labels,
                   const LabelEnergyParams &params);

struct LabelEnergyGradient {
  double energy = 0.0;
  Vector d_feature;
  Vector d_labels;
  LabelEnergyParams d_params;
};

LabelEnergyGradient LabelEnergyWithGradient(const Vector &feature,
                                            const Vector &labels,
                                            const LabelEnergyParams &params);

// Sentence energy: feature is the mention embedding f2, labels over |E|.
inline double SentenceEnergy(const Vector &mention, const Vector &labels,
                             const LabelEnergyParams &params) {
  return LabelEnergy(mention, labels, params);
}

// Document energy: feature is the pair feature f3, labels over |R|.
inline double DocumentEnergy(const Vector &pair, const Vector &labels,
                             const LabelEnergyParams &params) {
  return LabelEnergy(pair, labels, params);
}

// Euclidean projection of `v` onto the probability simplex.
Vector ProjectToSimplex(const Vector &v);

struct EnergyMinimization {
  Matrix labels;  // lowest-energy iterate
  double energy = 0.0;
  // Energies of the start point and every accepted iterate.
  std::vector<double> trace;
};

// Projected gradient descent over row-wise simplex labels, starting from
// uniform rows. A step is accepted only when it lowers the energy;
// otherwise the step size is halved. Requires steps >= 1.
EnergyMinimization MinimizeTokenEnergy(const Matrix &features,
                                       const TokenEnergyParams &params,
                                       int steps, double step_size);

EnergyMinimization MinimizeLabelEnergy(const Vector &feature,
                                       const LabelEnergyParams &params,
                                       int steps, double step_size);

}  // namespace ecsp

#endif  // ECSP_ENERGY_H_
