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

#ifndef ECSP_COMMON_H_
#define ECSP_COMMON_H_

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ecsp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file (JSONL line, config line, CSV row).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a data invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Invalid option values or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Caller broke a function precondition (shape mismatch, index range).
class ContractError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

#define ECSP_CHECK(cond, msg)                                          \
  do {                                                                 \
    if (!(cond)) throw ::ecsp::ContractError(std::string(msg));        \
  } while (0)

// Numerically stable softmax of a logit vector.
Vector Softmax(const Vector &logits);

// Row-wise softmax.
Matrix SoftmaxRows(const Matrix &logits);

// Given p = softmax(z) and dL/dp, returns dL/dz.
Vector SoftmaxBackward(const Vector &probs, const Vector &d_probs);

double Softplus(double x);
double Sigmoid(double x);

// True when every coefficient is finite.
template <typename Derived>
bool AllFinite(const Eigen::MatrixBase<Derived> &m) {
  return m.allFinite();
}

}  // namespace ecsp

#endif  // ECSP_COMMON_H_
