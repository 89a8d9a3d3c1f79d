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

// Oracles shared by the tests: central finite differences and random
// instance generators.

#ifndef ECSP_TESTS_TEST_UTIL_H_
#define ECSP_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <functional>

#include "ecsp/common.h"
#include "ecsp/energy.h"
#include "ecsp/rng.h"

namespace ecsp::testing {

inline constexpr double kStep = 1e-5;
inline constexpr double kGradTolerance = 1e-4;

// Central difference of `f` with respect to every entry of `x`.
inline Matrix NumericGradient(const Matrix &x,
                              const std::function<double(const Matrix &)> &f,
                              double h = kStep) {
  Matrix g(x.rows(), x.cols());
  Matrix probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double keep = probe(i);
    probe(i) = keep + h;
    const double up = f(probe);
    probe(i) = keep - h;
    const double down = f(probe);
    probe(i) = keep;
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

inline Vector NumericGradient(const Vector &x,
                              const std::function<double(const Vector &)> &f,
                              double h = kStep) {
  const Matrix m = NumericGradient(
      Matrix(x), [&](const Matrix &p) { return f(Vector(p.col(0))); }, h);
  return m.col(0);
}

// ||a - n|| / max(||a||, ||n||); zero when both vanish.
inline double RelativeError(const Matrix &analytic, const Matrix &numeric) {
  const double scale = std::max(analytic.norm(), numeric.norm());
  if (scale < 1e-10) return 0.0;
  return (analytic - numeric).norm() / scale;
}

inline Matrix RandomMatrix(Rng &rng, Eigen::Index rows, Eigen::Index cols,
                           double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = scale * rng.Normal();
  return m;
}

inline Vector RandomVector(Rng &rng, Eigen::Index n, double scale = 1.0) {
  return RandomMatrix(rng, n, 1, scale).col(0);
}

// Random rows of the simplex interior, kept away from the boundary: near
// p = 0 the cross-entropy's third derivative grows like 1/p^3 and central
// differences at h = 1e-5 lose accuracy there.
inline Matrix RandomSimplexRows(Rng &rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    double total = 0.0;
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = -std::log(1.0 - rng.Uniform()) + 0.05;
      total += m(r, c);
    }
    m.row(r) /= total;
  }
  return m;
}

inline Matrix RandomOneHotRows(Rng &rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m = Matrix::Zero(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    m(r, static_cast<Eigen::Index>(rng.Index(static_cast<size_t>(cols)))) = 1.0;
  }
  return m;
}

inline TokenEnergyParams RandomTokenParams(Rng &rng, int labels, int dim) {
  return {RandomMatrix(rng, labels, dim, 0.5), RandomMatrix(rng, labels, labels, 0.5)};
}

inline LabelEnergyParams RandomLabelParams(Rng &rng, int labels, int dim) {
  return {RandomMatrix(rng, labels, dim, 0.5), RandomVector(rng, labels, 0.5),
          RandomMatrix(rng, labels, labels, 0.5)};
}

}  // namespace ecsp::testing

#endif  // ECSP_TESTS_TEST_UTIL_H_
