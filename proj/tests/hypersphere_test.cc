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

#include <gtest/gtest.h>

#include <cmath>

#include "test_util.h"

namespace ecsp {
namespace {

using testing::NumericGradient;
using testing::RandomVector;
using testing::RelativeError;

TEST(InitCentroidsTest, UnitNormAndDeterministic) {
  const HypersphereSet a = InitCentroids(6, 5, 42);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(a.centroids.row(i).norm(), 1.0, 1e-6);
  const HypersphereSet b = InitCentroids(6, 5, 42);
  EXPECT_EQ(a.centroids, b.centroids);
  EXPECT_EQ(a.radii, Vector::Constant(6, 1.0));
  EXPECT_NE(a.centroids, InitCentroids(6, 5, 43).centroids);
}

TEST(InitCentroidsTest, PairwiseDistinctOverManySeeds) {
  double min_distance = 1e300;
  for (uint64_t seed = 0; seed < 1000; ++seed) {
    const HypersphereSet s = InitCentroids(5, 2, seed);
    for (int i = 0; i < 5; ++i) {
      for (int j = i + 1; j < 5; ++j) {
        min_distance = std::min(
            min_distance, (s.centroids.row(i) - s.centroids.row(j)).norm());
      }
    }
  }
  EXPECT_GT(min_distance, 0.0);
}

TEST(MeasureTest, TwoClassWorkedExample) {
  HypersphereSet s;
  s.centroids = Matrix::Zero(2, 3);
  s.centroids(0, 1) = 1.0;  // distance 1 from the origin
  s.centroids(1, 2) = 3.0;  // distance 3
  s.radii = Vector::Constant(2, 1.0);
  const Vector e = Vector::Zero(3);
  EXPECT_DOUBLE_EQ(HingeDistance(e, 0, s), 0.0);
  EXPECT_DOUBLE_EQ(HingeDistance(e, 1, s), 2.0);
  const Vector p = Measure(e, s);
  EXPECT_NEAR(p(0), 1.0 / (1.0 + std::exp(-2.0)), 1e-12);
  EXPECT_NEAR(p(0), 0.8808, 1e-3);
  EXPECT_NEAR(p(1), 0.1192, 1e-3);
}

TEST(MeasureTest, InsideEverySphereIsUniform) {
  HypersphereSet s = InitCentroids(4, 3, 1);
  s.radii = Vector::Constant(4, 5.0);
  const Vector p = Measure(Vector::Zero(3), s);
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(p(i), 0.25);
}

TEST(MeasureTest, SumsToOneAndOrdersByHinge) {
  Rng rng(3);
  const HypersphereSet s = InitCentroids(5, 4, 9, 0.5);
  for (int it = 0; it < 1000; ++it) {
    const Vector e = RandomVector(rng, 4, 2.0);
    const Vector p = Measure(e, s);
    const Vector h = HingeDistances(e, s);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        if (h(i) < h(j)) EXPECT_GT(p(i), p(j));
      }
    }
  }
}

TEST(MeasureTest, DimensionMismatchIsContractError) {
  const HypersphereSet s = InitCentroids(3, 4, 1);
  EXPECT_THROW(Measure(Vector::Zero(3), s), ContractError);
  EXPECT_THROW(HingeDistance(Vector::Zero(4), 3, s), ContractError);
}

TEST(HingeDistanceTest, GradientMatchesFiniteDifferences) {
  Rng rng(12);
  const HypersphereSet s = InitCentroids(3, 4, 2, 0.7);
  for (int it = 0; it < 100; ++it) {
    const Vector e = RandomVector(rng, 4, 1.5);
    const int c = rng.Between(0, 2);
    const Vector numeric = NumericGradient(
        e, [&](const Vector &x) { return HingeDistance(x, c, s); });
    EXPECT_LT(RelativeError(HingeDistanceGradient(e, c, s), numeric), 1e-6);
  }
  // Inside the sphere the hinge is flat.
  const Vector inside = s.centroids.row(0).transpose() * 1.01;
  EXPECT_EQ(HingeDistanceGradient(inside, 0, s), Vector::Zero(4));
}

TEST(MeasureBackwardTest, MatchesFiniteDifferences) {
  Rng rng(13);
  HypersphereSet s = InitCentroids(4, 3, 5, 0.6);
  s.radii << 0.5, 0.6, 0.7, 0.8;
  for (int it = 0; it < 50; ++it) {
    const Vector e = RandomVector(rng, 3, 1.5);
    const Vector w = RandomVector(rng, 4);
    const MeasureGradient g = MeasureBackward(e, s, w);
    EXPECT_LT(RelativeError(g.d_embedding,
                            NumericGradient(e, [&](const Vector &x) {
                              return Measure(x, s).dot(w);
                            })),
              1e-6);
    EXPECT_LT(RelativeError(g.d_centroids,
                            NumericGradient(s.centroids, [&](const Matrix &x) {
                              HypersphereSet t = s;
                              t.centroids = x;
                              return Measure(e, t).dot(w);
                            })),
              1e-6);
    EXPECT_LT(RelativeError(g.d_radii, NumericGradient(s.radii, [&](const Vector &x) {
                              HypersphereSet t = s;
                              t.radii = x;
                              return Measure(e, t).dot(w);
                            })),
              1e-6);
  }
}

TEST(HypersphereSetTest, ValidateRejectsBadRadius) {
  HypersphereSet s = InitCentroids(2, 2, 1);
  EXPECT_NO_THROW(s.Validate());
  s.radii(1) = 0.0;
  EXPECT_THROW(s.Validate(), Error);
  s.radii(1) = 1.0;
  s.centroids(0, 0) = std::nan("");
  EXPECT_THROW(s.Validate(), Error);
}

}  // namespace
}  // namespace ecsp
