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

#include "optbag/estimators.h"

#include <cmath>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace optbag {
namespace {

using ::optbag::testing::MakeBagging;
using ::optbag::testing::RandomMatrix;
using ::optbag::testing::RandomVector;
using ::optbag::testing::ShuffledBagging;
using ::optbag::testing::UnitBagging;
using ::testing::HasSubstr;

// Least squares through the SVD, independent of the library's QR path.
VectorXd SvdLeastSquares(const MatrixXd& a, const VectorXd& b) {
  return a.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
}

TEST(MakeBagLabelsTest, UnitBagsReturnLabels) {
  Rng rng(1);
  const VectorXd y = RandomVector(7, rng);
  for (const AggregationKind kind : {AggregationKind::kMirSample, AggregationKind::kLlpMean}) {
    const AggregateLabels labels = MakeBagLabels(y, UnitBagging(7), kind, rng);
    EXPECT_EQ(labels.values, y);
    EXPECT_EQ(labels.kind, kind);
    EXPECT_FALSE(labels.privatized);
    EXPECT_EQ(labels.noise_std, 0.0);
  }
}

TEST(MakeBagLabelsTest, LlpMeanAveragesTheBag) {
  Rng rng(2);
  VectorXd y(2);
  y << 2.0, 4.0;
  const AggregateLabels labels =
      MakeBagLabels(y, MakeBagging({{0, 1}}, 2), AggregationKind::kLlpMean, rng);
  ASSERT_EQ(labels.values.size(), 1);
  EXPECT_DOUBLE_EQ(labels.values[0], 3.0);
}

TEST(MakeBagLabelsTest, MirSampleIsUnbiasedForTheBagMean) {
  Rng rng(3);
  VectorXd y(5);
  y << 1.0, -2.0, 4.0, 0.5, 3.0;
  const Bagging b = MakeBagging({{0, 2, 4}, {1, 3}}, 5);
  constexpr int kDraws = 10000;
  VectorXd sum = VectorXd::Zero(2);
  VectorXd sum_sq = VectorXd::Zero(2);
  for (int i = 0; i < kDraws; ++i) {
    const VectorXd v = MakeBagLabels(y, b, AggregationKind::kMirSample, rng).values;
    sum += v;
    sum_sq += v.cwiseProduct(v);
  }
  const VectorXd mean = sum / kDraws;
  const VectorXd var = sum_sq / kDraws - mean.cwiseProduct(mean);
  EXPECT_NEAR(mean[0], 8.0 / 3.0, 4 * std::sqrt(var[0] / kDraws));
  EXPECT_NEAR(mean[1], -0.75, 4 * std::sqrt(var[1] / kDraws));
}

TEST(FitInstanceMirTest, UnitBagsNoiselessRecoversTheta) {
  Rng rng(4);
  const MatrixXd x = RandomMatrix(40, 5, rng);
  const VectorXd theta = RandomVector(5, rng);
  const Bagging b = UnitBagging(40);
  const AggregateLabels labels = MakeBagLabels(x * theta, b, AggregationKind::kMirSample, rng);
  absl::StatusOr<ModelEstimate> fit = FitInstanceMir(x, b, labels);
  ASSERT_TRUE(fit.ok()) << fit.status();
  EXPECT_LE((fit->theta_hat - theta).norm(), 1e-9);
  EXPECT_EQ(fit->loss_kind, LossKind::kInstanceMir);
}

TEST(FitInstanceMirTest, MatchesLeastSquaresOnBroadcastLabels) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixXd x = RandomMatrix(60, 4, rng);
    const VectorXd y = RandomVector(60, rng);
    const Bagging b = ShuffledBagging(60, 5, rng);
    const AggregateLabels labels = MakeBagLabels(y, b, AggregationKind::kMirSample, rng);
    const VectorXd expected = SvdLeastSquares(x, Broadcast(b, labels.values));
    EXPECT_LE((FitInstanceMir(x, b, labels)->theta_hat - expected).norm(),
              1e-10 * std::max(1.0, expected.norm()));
  }
}

TEST(FitInstanceMirTest, RankDeficient) {
  MatrixXd x = MatrixXd::Ones(10, 2);
  Rng rng(6);
  const Bagging b = UnitBagging(10);
  absl::StatusOr<ModelEstimate> fit =
      FitInstanceMir(x, b, MakeBagLabels(VectorXd::Ones(10), b, AggregationKind::kMirSample, rng));
  ASSERT_FALSE(fit.ok());
  EXPECT_THAT(std::string(fit.status().message()), HasSubstr("RankDeficient"));
}

TEST(FitInstanceMirTest, RejectsMeanLabels) {
  Rng rng(7);
  const MatrixXd x = RandomMatrix(10, 2, rng);
  const Bagging b = ShuffledBagging(10, 2, rng);
  EXPECT_FALSE(FitInstanceMir(x, b, MakeBagLabels(RandomVector(10, rng), b,
                                                  AggregationKind::kLlpMean, rng))
                   .ok());
}

TEST(FitBagLlpTest, UnitBagsGiveOls) {
  Rng rng(8);
  const MatrixXd x = RandomMatrix(30, 3, rng);
  const VectorXd y = RandomVector(30, rng);
  const Bagging b = UnitBagging(30);
  const VectorXd llp =
      FitBagLlp(x, b, MakeBagLabels(y, b, AggregationKind::kLlpMean, rng))->theta_hat;
  EXPECT_LE((llp - SvdLeastSquares(x, y)).norm(), 1e-10);
  EXPECT_LE((FitOls(x, y)->theta_hat - SvdLeastSquares(x, y)).norm(), 1e-10);
}

TEST(FitBagLlpTest, NoiselessRecoversTheta) {
  Rng rng(9);
  const MatrixXd x = RandomMatrix(100, 4, rng);
  const VectorXd theta = RandomVector(4, rng);
  const Bagging b = ShuffledBagging(100, 10, rng);
  const AggregateLabels labels = MakeBagLabels(x * theta, b, AggregationKind::kLlpMean, rng);
  EXPECT_LE((FitBagLlp(x, b, labels)->theta_hat - theta).norm(), 1e-9);
  const VectorXd oracle = SvdLeastSquares(BagMeans(b, x), labels.values);
  EXPECT_LE((FitBagLlp(x, b, labels)->theta_hat - oracle).norm(), 1e-10);
}

TEST(FitBagLlpTest, FewerBagsThanFeatures) {
  Rng rng(10);
  const MatrixXd x = RandomMatrix(12, 4, rng);
  const Bagging b = ShuffledBagging(12, 4, rng);  // m = 3 < d = 4
  absl::StatusOr<ModelEstimate> fit =
      FitBagLlp(x, b, MakeBagLabels(RandomVector(12, rng), b, AggregationKind::kLlpMean, rng));
  ASSERT_FALSE(fit.ok());
  EXPECT_THAT(std::string(fit.status().message()), HasSubstr("RankDeficient"));
}

TEST(FitAggMirTest, UnitBagsGiveOls) {
  Rng rng(11);
  const MatrixXd x = RandomMatrix(30, 3, rng);
  const VectorXd y = RandomVector(30, rng);
  const Bagging b = UnitBagging(30);
  const VectorXd agg =
      FitAggMir(x, b, MakeBagLabels(y, b, AggregationKind::kMirSample, rng))->theta_hat;
  EXPECT_LE((agg - SvdLeastSquares(x, y)).norm(), 1e-10);
}

TEST(FitAggMirTest, ConstantWithinBagLabelsRecoverTheta) {
  // Rows repeat within each bag, so every sampled label equals the bag mean.
  Rng rng(12);
  constexpr int kBags = 8;
  constexpr int kK = 3;
  const MatrixXd centers = RandomMatrix(kBags, 3, rng);
  MatrixXd x(kBags * kK, 3);
  std::vector<std::vector<int>> bags(kBags);
  for (int i = 0; i < kBags * kK; ++i) {
    x.row(i) = centers.row(i % kBags);
    bags[static_cast<size_t>(i % kBags)].push_back(i);
  }
  const Bagging b = MakeBagging(bags, kBags * kK);
  const VectorXd theta = RandomVector(3, rng);
  const AggregateLabels labels = MakeBagLabels(x * theta, b, AggregationKind::kMirSample, rng);
  EXPECT_LE((FitAggMir(x, b, labels)->theta_hat - theta).norm(), 1e-9);
}

TEST(FitLossTest, DispatchesByKind) {
  Rng rng(13);
  const MatrixXd x = RandomMatrix(40, 3, rng);
  const VectorXd y = RandomVector(40, rng);
  const Bagging b = ShuffledBagging(40, 4, rng);
  for (const LossKind kind : {LossKind::kInstanceMir, LossKind::kBagLlp, LossKind::kAggMir}) {
    Rng a(14);
    Rng c(14);
    const AggregateLabels labels = MakeBagLabels(y, b, AggregationFor(kind), a);
    absl::StatusOr<ModelEstimate> fit = FitLoss(kind, x, b, labels);
    ASSERT_TRUE(fit.ok()) << fit.status();
    EXPECT_EQ(fit->loss_kind, kind);
    EXPECT_EQ(*ParseLossKind(LossKindName(kind)), kind);
    (void)c;
  }
  EXPECT_EQ(AggregationFor(LossKind::kBagLlp), AggregationKind::kLlpMean);
  EXPECT_EQ(AggregationFor(LossKind::kAggMir), AggregationKind::kMirSample);
  EXPECT_FALSE(ParseLossKind("llp").ok());
}

TEST(EstimationErrorTest, SquaredDistance) {
  Rng rng(15);
  const VectorXd theta = RandomVector(6, rng);
  ModelEstimate estimate{theta, LossKind::kOls};
  EXPECT_EQ(*EstimationError(estimate, theta), 0.0);
  estimate.theta_hat[0] += 1.0;
  EXPECT_DOUBLE_EQ(*EstimationError(estimate, theta), 1.0);
  const VectorXd other = RandomVector(6, rng);
  estimate.theta_hat = other;
  double direct = 0.0;
  for (int j = 0; j < 6; ++j) direct += (other[j] - theta[j]) * (other[j] - theta[j]);
  EXPECT_NEAR(*EstimationError(estimate, theta), direct, 1e-14);
  EXPECT_FALSE(EstimationError(estimate, RandomVector(5, rng)).ok());
}

// E||theta_hat - theta*||^2 = E_A[bias(A) + sigma^2 ||P A||_F^2] with
// P = (X^T X)^{-1} X^T and bias(A) = ||P (A - I) X theta*||^2.
TEST(ErrorDecompositionTest, MonteCarloMatchesBiasPlusVariance) {
  Rng rng(16);
  constexpr int kN = 40;
  constexpr int kD = 3;
  constexpr double kSigma = 0.7;
  const MatrixXd x = RandomMatrix(kN, kD, rng);
  const VectorXd theta = RandomVector(kD, rng);
  const VectorXd ytilde = x * theta;
  const Bagging b = ShuffledBagging(kN, 4, rng);
  const MatrixXd p = (x.transpose() * x).inverse() * x.transpose();
  constexpr int kDraws = 20000;
  std::vector<double> diffs;
  diffs.reserve(kDraws);
  for (int draw = 0; draw < kDraws; ++draw) {
    const AttributionDraw attribution = SampleAttribution(b, rng);
    MatrixXd a = MatrixXd::Zero(kN, kN);
    for (int i = 0; i < kN; ++i) {
      a(i, attribution.chosen[static_cast<size_t>(b.assignment()[static_cast<size_t>(i)])]) = 1.0;
    }
    VectorXd y = ytilde;
    for (int i = 0; i < kN; ++i) y[i] += kSigma * rng.Gaussian();
    const AggregateLabels labels = MirBagLabels(y, b, attribution);
    const double error = *EstimationError(*FitInstanceMir(x, b, labels), theta);
    const double bias = (p * (a - MatrixXd::Identity(kN, kN)) * ytilde).squaredNorm();
    const double variance = kSigma * kSigma * (p * a).squaredNorm();
    diffs.push_back(error - bias - variance);
  }
  double mean = 0.0;
  for (const double d : diffs) mean += d;
  mean /= kDraws;
  double var = 0.0;
  for (const double d : diffs) var += (d - mean) * (d - mean);
  const double se = std::sqrt(var / (kDraws - 1) / kDraws);
  EXPECT_NEAR(mean, 0.0, 4 * se);
}

}  // namespace
}  // namespace optbag
