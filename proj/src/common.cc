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

#include "ecsp/common.h"

#include <cmath>

namespace ecsp {

Vector Softmax(const Vector &logits) {
  const double top = logits.maxCoeff();
  Vector out = (logits.array() - top).exp().matrix();
  out /= out.sum();
  return out;
}

Matrix SoftmaxRows(const Matrix &logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    out.row(r) = Softmax(logits.row(r).transpose()).transpose();
  }
  return out;
}

Vector SoftmaxBackward(const Vector &probs, const Vector &d_probs) {
  const double inner = probs.dot(d_probs);
  return (probs.array() * (d_probs.array() - inner)).matrix();
}

double Softplus(double x) {
  // log(1 + e^x) without overflow.
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace ecsp
