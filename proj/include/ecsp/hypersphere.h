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

// Event classes as hyperspheres. Class i is a centroid P_i with radius
// gamma_i; a mention embedding f scores class i by the hinge distance
// [||P_i - f|| - gamma_i]_+ and the class distribution is the softmax of the
// negated hinge distances.

#ifndef ECSP_HYPERSPHERE_H_
#define ECSP_HYPERSPHERE_H_

#include <cstdint>

#include "ecsp/common.h"

namespace ecsp {

inline constexpr double kDefaultRadius = 1.0;

struct HypersphereSet {
  Matrix centroids;  // |E| x d
  Vector radii;      // |E|, all equal unless per-class radii are trained

  int num_classes() const { return static_cast<int>(centroids.rows()); }
  int dim() const { return static_cast<int>(centroids.cols()); }
  HypersphereSet ZerosLike() const;
  // Throws ValidationError unless entries are finite and radii positive.
  void Validate() const;
};

// Unit-norm centroids drawn from an isotropic Gaussian.
HypersphereSet InitCentroids(int n_classes, int dim, uint64_t seed,
                             double radius = kDefaultRadius);

double HingeDistance(const Vector &embedding, int class_index,
                     const HypersphereSet &spheres);

// d HingeDistance / d embedding. Zero on or inside the sphere.
Vector HingeDistanceGradient(const Vector &embedding, int class_index,
                             const HypersphereSet &spheres);

// Hinge distances to every centroid.
Vector HingeDistances(const Vector &embedding, const HypersphereSet &spheres);

// Class distribution S over |E|.
Vector Measure(const Vector &embedding, const HypersphereSet &spheres);

struct MeasureGradient {
  Vector d_embedding;
  Matrix d_centroids;
  Vector d_radii;
};

// Backward of Measure given dLoss/dS.
MeasureGradient MeasureBackward(const Vector &embedding,
                                const HypersphereSet &spheres,
                                const Vector &d_probs);

}  // namespace ecsp

#endif  // ECSP_HYPERSPHERE_H_
