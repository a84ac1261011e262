// Copyright 2026 The optbag Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "optbag/data_model.h"

#include <cmath>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace optbag {
namespace {

using ::optbag::testing::DirectKMeans;
using ::optbag::testing::MakeBagging;
using ::optbag::testing::RandomMatrix;
using ::optbag::testing::RandomVector;
using ::optbag::testing::ShuffledBagging;
using ::optbag::testing::UnitBagging;
using ::optbag::testing::Members;
using ::testing::ElementsAre;

TEST(BaggingTest, FromAssignmentGroupsEqualBags) {
  absl::StatusOr<Bagging> b = Bagging::FromAssignment(std::vector<int>{0, 0, 1, 1}, 2);
  ASSERT_TRUE(b.ok()) << b.status();
  ASSERT_EQ(b->num_bags(), 2);
  EXPECT_THAT(Members(b->bag(0)), ElementsAre(0, 1));
  EXPECT_THAT(Members(b->bag(1)), ElementsAre(2, 3));
}

TEST(BaggingTest, FromAssignmentParity) {
  absl::StatusOr<Bagging> b =
      Bagging::FromAssignment(std::vector<int>{0, 1, 0, 1, 0}, 2);
  ASSERT_TRUE(b.ok()) << b.status();
  EXPECT_THAT(Members(b->bag(0)), ElementsAre(0, 2, 4));
  EXPECT_THAT(Members(b->bag(1)), ElementsAre(1, 3));
  EXPECT_FALSE(b->equal_sized());
}

TEST(BaggingTest, RejectsUndersizedBag) {
  absl::StatusOr<Bagging> b = Bagging::FromAssignment(std::vector<int>{0, 0, 1}, 2);
  ASSERT_FALSE(b.ok());
  EXPECT_EQ(b.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_THAT(std::string(b.status().message()),
              ::testing::HasSubstr("BagTooSmall(1, 1)"));
}

TEST(BaggingTest, RejectsNonContiguousIndices) {
  absl::StatusOr<Bagging> b = Bagging::FromAssignment(std::vector<int>{0, 2, 0, 2}, 1);
  ASSERT_FALSE(b.ok());
  EXPECT_THAT(std::string(b.status().message()),
              ::testing::HasSubstr("NonContiguousBagIndex"));
}

TEST(BaggingTest, CanonicalFormMakesEqualPartitionsEqual) {
  const Bagging a = *Bagging::FromAssignment(std::vector<int>{1, 1, 0, 0}, 1);
  const Bagging b = MakeBagging({{3, 2}, {1, 0}}, 4);
  EXPECT_EQ(a, b);
  EXPECT_THAT(Members(a.bag(0)), ElementsAre(0, 1));
}

TEST(BaggingTest, FromBagsRejectsOverlapAndGaps) {
  EXPECT_FALSE(Bagging::FromBags({{0, 1}, {1, 2}}, 3, 1).ok());
  EXPECT_FALSE(Bagging::FromBags({{0, 1}}, 3, 1).ok());
}

TEST(BaggingMatrixTest, TwoEqualBags) {
  const MatrixXd s = MatrixXd(BaggingMatrix(MakeBagging({{0, 1}, {2, 3}}, 4)));
  MatrixXd expected(2, 4);
  expected << 0.5, 0.5, 0, 0, 0, 0, 0.5, 0.5;
  EXPECT_TRUE(s.isApprox(expected));
}

TEST(BaggingMatrixTest, UnitBagsGiveIdentity) {
  const MatrixXd s = MatrixXd(BaggingMatrix(UnitBagging(5)));
  EXPECT_TRUE(s.isApprox(MatrixXd::Identity(5, 5)));
}

TEST(BaggingMatrixTest, SingleBagOfThree) {
  const MatrixXd s = MatrixXd(BaggingMatrix(MakeBagging({{0, 1, 2}}, 3)));
  ASSERT_EQ(s.rows(), 1);
  for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(s(0, j), 1.0 / 3.0);
}

TEST(BaggingMatrixTest, RowStochasticWithDiagonalGram) {
  Rng rng(11);
  const Bagging b = MakeBagging({{0, 4, 5}, {1, 2}, {3, 6, 7, 8}}, 9);
  const MatrixXd s = MatrixXd(BaggingMatrix(b));
  for (int l = 0; l < b.num_bags(); ++l) EXPECT_NEAR(s.row(l).sum(), 1.0, 1e-12);
  const MatrixXd gram = s * s.transpose();
  for (int l = 0; l < b.num_bags(); ++l) {
    for (int j = 0; j < b.num_bags(); ++j) {
      const double expected = l == j ? 1.0 / b.bag_size(l) : 0.0;
      EXPECT_NEAR(gram(l, j), expected, 1e-12);
    }
  }
}

TEST(BaggingMatrixTest, SmoothingMatrixFactorsThroughRoot) {
  Rng rng(12);
  const Bagging b = MakeBagging({{0, 4, 5}, {1, 2}, {3, 6, 7, 8}}, 9);
  const MatrixXd m = MatrixXd(RootBaggingMatrix(b));
  const MatrixXd s = MatrixXd(InstanceSmoothingMatrix(b));
  EXPECT_LE((m.transpose() * m - s).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_DOUBLE_EQ(s(0, 4), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(s(1, 2), 0.5);
  EXPECT_DOUBLE_EQ(s(0, 1), 0.0);
}

TEST(BagMeansTest, MatchesMatrixProduct) {
  Rng rng(13);
  const Bagging b = ShuffledBagging(30, 5, rng);
  const MatrixXd x = RandomMatrix(30, 3, rng);
  const VectorXd v = RandomVector(30, rng);
  const MatrixXd s = MatrixXd(BaggingMatrix(b));
  EXPECT_TRUE(BagMeans(b, x).isApprox(s * x, 1e-12));
  EXPECT_TRUE(BagMeans(b, v).isApprox(s * v, 1e-12));
}

TEST(BroadcastTest, EachInstanceGetsItsBagValue) {
  const Bagging b = MakeBagging({{0, 2}, {1, 3}}, 4);
  VectorXd values(2);
  values << 7.0, -1.0;
  const VectorXd out = Broadcast(b, values);
  EXPECT_THAT(std::vector<double>(out.data(), out.data() + 4),
              ElementsAre(7.0, -1.0, 7.0, -1.0));
}

TEST(AttributionTest, UnitBagsAreDeterministic) {
  Rng rng(14);
  const AttributionDraw draw = SampleAttribution(UnitBagging(6), rng);
  EXPECT_THAT(draw.chosen, ElementsAre(0, 1, 2, 3, 4, 5));
}

TEST(AttributionTest, TwoMemberBagIsFair) {
  Rng rng(15);
  const Bagging b = MakeBagging({{0, 1}}, 2);
  constexpr int kDraws = 10000;
  int zeros = 0;
  for (int i = 0; i < kDraws; ++i) zeros += SampleAttribution(b, rng).chosen[0] == 0;
  EXPECT_NEAR(static_cast<double>(zeros) / kDraws, 0.5, 4.0 * 0.5 / std::sqrt(kDraws));
}

TEST(AttributionTest, ExpectedAttributionMatrixIsBaggingMatrix) {
  Rng rng(16);
  const Bagging b = MakeBagging({{0, 3}, {1, 2, 4}}, 5);
  constexpr int kDraws = 10000;
  MatrixXd mean = MatrixXd::Zero(2, 5);
  for (int i = 0; i < kDraws; ++i) {
    const AttributionDraw draw = SampleAttribution(b, rng);
    for (int l = 0; l < 2; ++l) {
      EXPECT_THAT(Members(b.bag(l)), ::testing::Contains(draw.chosen[static_cast<size_t>(l)]));
    }
    mean += MatrixXd(AttributionMatrix(b, draw));
  }
  mean /= kDraws;
  const MatrixXd s = MatrixXd(BaggingMatrix(b));
  for (int l = 0; l < 2; ++l) {
    for (int j = 0; j < 5; ++j) {
      const double p = s(l, j);
      const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / kDraws);
      EXPECT_NEAR(mean(l, j), p, 4.0 * se + 1e-12);
    }
  }
}

TEST(KMeansObjectiveTest, HandComputedValue) {
  VectorXd v(4);
  v << 1, 2, 3, 4;
  EXPECT_DOUBLE_EQ(KMeansObjective1d(v, MakeBagging({{0, 1}, {2, 3}}, 4)), 1.0);
}

TEST(KMeansObjectiveTest, UnitBagsAndConstantsGiveZero) {
  Rng rng(17);
  EXPECT_DOUBLE_EQ(KMeansObjective1d(RandomVector(8, rng), UnitBagging(8)), 0.0);
  EXPECT_NEAR(KMeansObjective1d(VectorXd::Constant(8, 3.5), ShuffledBagging(8, 4, rng)),
              0.0, 1e-24);
}

TEST(KMeansObjectiveTest, MatchesDefinition) {
  Rng rng(18);
  for (int trial = 0; trial < 20; ++trial) {
    const Bagging b = ShuffledBagging(24, 4, rng);
    const VectorXd v = RandomVector(24, rng);
    EXPECT_NEAR(KMeansObjective1d(v, b), DirectKMeans(v, b.bags()), 1e-10);
  }
}

TEST(KMeansObjectiveTest, SquareCornersInOneBag) {
  MatrixXd x(4, 2);
  x << 0, 0, 2, 0, 0, 2, 2, 2;
  EXPECT_DOUBLE_EQ(KMeansObjective(x, MakeBagging({{0, 1, 2, 3}}, 4)), 8.0);
  EXPECT_DOUBLE_EQ(KMeansObjective(x, UnitBagging(4)), 0.0);
}

TEST(KMeansObjectiveTest, RotationInvariantAndSumsOverDirections) {
  Rng rng(19);
  const MatrixXd x = RandomMatrix(30, 4, rng);
  const Bagging b = ShuffledBagging(30, 3, rng);
  const Eigen::HouseholderQR<MatrixXd> qr(RandomMatrix(4, 4, rng));
  const MatrixXd q = qr.householderQ() * MatrixXd::Identity(4, 4);
  const double base = KMeansObjective(x, b);
  EXPECT_NEAR(KMeansObjective(x * q, b), base, 1e-9 * base);
  double per_direction = 0.0;
  for (int j = 0; j < 4; ++j) per_direction += KMeansObjective1d(VectorXd(x * q.col(j)), b);
  EXPECT_NEAR(per_direction, base, 1e-9 * base);
}

TEST(DatasetTest, ValidationChecksShapesAndConsistency) {
  Rng rng(20);
  Dataset ds;
  ds.features = RandomMatrix(10, 2, rng);
  ds.theta_star = RandomVector(2, rng);
  ds.expected_labels = ds.features * *ds.theta_star;
  ds.labels = *ds.expected_labels;
  EXPECT_TRUE(ValidateDataset(ds).ok());
  (*ds.expected_labels)[0] += 1.0;
  EXPECT_FALSE(ValidateDataset(ds).ok());
  ds.expected_labels.reset();
  ds.labels = VectorXd::Zero(9);
  EXPECT_FALSE(ValidateDataset(ds).ok());
}

TEST(DatasetTest, RestrictKeepsRowsInOrder) {
  Rng rng(21);
  Dataset ds;
  ds.features = RandomMatrix(6, 2, rng);
  ds.labels = RandomVector(6, rng);
  const std::vector<int> rows = {4, 1};
  const Dataset sub = RestrictDataset(ds, rows);
  ASSERT_EQ(sub.n(), 2);
  EXPECT_EQ(sub.features.row(0), ds.features.row(4));
  EXPECT_EQ(sub.labels[1], ds.labels[1]);
}

}  // namespace
}  // namespace optbag
