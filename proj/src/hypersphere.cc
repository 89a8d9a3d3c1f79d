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

#include "ecsp/hypersphere.h"

#include <algorithm>

#include "ecsp/rng.h"

namespace ecsp {

HypersphereSet HypersphereSet::ZerosLike() const {
  return {Matrix::Zero(centroids.rows(), centroids.cols()),
          Vector::Zero(radii.size())};
}

void HypersphereSet::Validate() const {
  if (radii.size() != centroids.rows()) {
    throw ValidationError("one radius per centroid required");
  }
  if (!centroids.allFinite() || !radii.allFinite()) {
    throw ValidationError("non-finite hypersphere parameters");
  }
  if (radii.size() > 0 && radii.minCoeff() <= 0.0) {
    throw ValidationError("hypersphere radius must be positive");
  }
}

HypersphereSet InitCentroids(int n_classes, int dim, uint64_t seed,
                             double radius) {
  ECSP_CHECK(n_classes >= 1, "need at least one class");
  ECSP_CHECK(dim >= 2, "embedding dimension must be >= 2");
  ECSP_CHECK(radius > 0.0, "radius must be positive");
  Rng rng(seed);
  HypersphereSet set;
  set.centroids.resize(n_classes, dim);
  for (int i = 0; i < n_classes; ++i) {
    Vector v(dim);
    do {
      for (int k = 0; k < dim; ++k) v(k) = rng.Normal();
    } while (v.norm() == 0.0);
    set.centroids.row(i) = v.normalized().transpose();
  }
  set.radii = Vector::Constant(n_classes, radius);
  return set;
}

double HingeDistance(const Vector &embedding, int class_index,
                     const HypersphereSet &spheres) {
  ECSP_CHECK(class_index >= 0 && class_index < spheres.num_classes(),
             "class index out of range");
  ECSP_CHECK(embedding.size() == spheres.dim(),
             "embedding/centroid dimension mismatch");
  const double dist =
      (spheres.centroids.row(class_index).transpose() - embedding).norm();
  return std::max(0.0, dist - spheres.radii(class_index));
}

Vector HingeDistanceGradient(const Vector &embedding, int class_index,
                             const HypersphereSet &spheres) {
  ECSP_CHECK(class_index >= 0 && class_index < spheres.num_classes(),
             "class index out of range");
  const Vector diff =
      embedding - spheres.centroids.row(class_index).transpose();
  const double dist = diff.norm();
  // Subgradient 0 at the kink and inside the sphere.
  if (dist <= spheres.radii(class_index)) return Vector::Zero(embedding.size());
  return diff / dist;
}

Vector HingeDistances(const Vector &embedding, const HypersphereSet &spheres) {
  ECSP_CHECK(embedding.size() == spheres.dim(),
             "embedding/centroid dimension mismatch");
  Vector h(spheres.num_classes());
  for (int i = 0; i < spheres.num_classes(); ++i) {
    h(i) = HingeDistance(embedding, i, spheres);
  }
  return h;
}

Vector Measure(const Vector &embedding, const HypersphereSet &spheres) {
  return Softmax(-HingeDistances(embedding, spheres));
}

MeasureGradient MeasureBackward(const Vector &embedding,
                                const HypersphereSet &spheres,
                                const Vector &d_probs) {
  const int n = spheres.num_classes();
  ECSP_CHECK(d_probs.size() == n, "measure gradient length mismatch");
  const Vector probs = Measure(embedding, spheres);
  // logits = -hinge, so dL/dhinge = -dL/dlogits.
  const Vector d_hinge = -SoftmaxBackward(probs, d_probs);
  MeasureGradient g{Vector::Zero(embedding.size()),
                    Matrix::Zero(n, spheres.dim()), Vector::Zero(n)};
  for (int i = 0; i < n; ++i) {
    const Vector diff = embedding - spheres.centroids.row(i).transpose();
    const double dist = diff.norm();
    if (dist <= spheres.radii(i)) continue;
    const Vector unit = diff / dist;
    g.d_embedding += d_hinge(i) * unit;
    g.d_centroids.row(i) -= d_hinge(i) * unit.transpose();
    g.d_radii(i) -= d_hinge(i);
  }
  return g;
}

}  // namespace ecsp
