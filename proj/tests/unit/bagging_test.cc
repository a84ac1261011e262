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

#include "optbag/bagging.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace optbag {
namespace {

using ::optbag::testing::DirectKMeans;
using ::optbag::testing::RandomMatrix;
using ::optbag::testing::RandomVector;
using ::testing::ElementsAre;
using ::testing::HasSubstr;
using ::testing::UnorderedElementsAre;

std::span<const double> Span(const std::vector<double>& v) { return v; }
std::span<const double> Span(const VectorXd& v) {
  return {v.data(), static_cast<size_t>(v.size())};
}

// Exhaustive minimum over set partitions with bag sizes >= k (or == k).
double EnumerateOptimum(const std::vector<double>& v, int k, bool exact) {
  const int n = static_cast<int>(v.size());
  std::vector<std::vector<int>> blocks;
  double best = std::numeric_limits<double>::infinity();
  VectorXd values = Eigen::Map<const VectorXd>(v.data(), n);
  std::function<void(int)> recurse = [&](int i) {
    if (i == n) {
      for (const auto& block : blocks) {
        const int size = static_cast<int>(block.size());
        if (size < k || (exact && size != k)) return;
      }
      best = std::min(best, DirectKMeans(values, blocks));
      return;
    }
    const size_t open = blocks.size();
    for (size_t b = 0; b < open; ++b) {
      blocks[b].push_back(i);
      recurse(i + 1);
      blocks[b].pop_back();
    }
    blocks.push_back({i});
    recurse(i + 1);
    blocks.pop_back();
  };
  recurse(0);
  return best;
}

void ExpectPartition(const Bagging& b, int n) {
  std::vector<int> seen(static_cast<size_t>(n), 0);
  for (int l = 0; l < b.num_bags(); ++l) {
    for (const int i : b.bag(l)) {
      ++seen[static_cast<size_t>(i)];
      EXPECT_EQ(b.assignment()[static_cast<size_t>(i)], l);
    }
  }
  for (const int count : seen) EXPECT_EQ(count, 1);
}

TEST(LabelKMeansEqualTest, SortsAndChunks) {
  const std::vector<double> values = {5, 1, 4, 2, 3, 6};
  absl::StatusOr<Bagging> b = LabelKMeansEqual(values, 2);
  ASSERT_TRUE(b.ok()) << b.status();
  EXPECT_THAT(b->bags(), UnorderedElementsAre(ElementsAre(1, 3), ElementsAre(2, 4),
                                               ElementsAre(0, 5)));
  EXPECT_DOUBLE_EQ(KMeansObjective1d(Span(values), *b), 1.5);
  EXPECT_DOUBLE_EQ(EnumerateOptimum(values, 2, true), 1.5);
}

TEST(LabelKMeansEqualTest, ConstantValuesAndSingleBag) {
  const std::vector<double> constant(12, 2.5);
  EXPECT_DOUBLE_EQ(KMeansObjective1d(Span(constant), *LabelKMeansEqual(constant, 3)), 0.0);
  const std::vector<double> sorted = {1, 2, 3, 4};
  const Bagging single = *LabelKMeansEqual(sorted, 4);
  EXPECT_EQ(single.num_bags(), 1);
  EXPECT_DOUBLE_EQ(KMeansObjective1d(Span(sorted), single), 5.0);
}

TEST(LabelKMeansEqualTest, NotDivisible) {
  absl::StatusOr<Bagging> b = LabelKMeansEqual(std::vector<double>{1, 2, 3}, 2);
  ASSERT_FALSE(b.ok());
  EXPECT_THAT(std::string(b.status().message()), HasSubstr("NotDivisible"));
}

TEST(LabelKMeansEqualTest, StableTieBreakOnIndex) {
  const std::vector<double> values = {1, 1, 1, 1};
  const Bagging b = *LabelKMeansEqual(values, 2);
  EXPECT_THAT(b.bags(), ElementsAre(ElementsAre(0, 1), ElementsAre(2, 3)));
}

TEST(LabelKMeansMinSizeTest, SplitsAtTheGap) {
  const std::vector<double> values = {0, 0, 0, 10, 10};
  absl::StatusOr<Bagging> b = LabelKMeansMinSize(values, 2);
  ASSERT_TRUE(b.ok()) << b.status();
  EXPECT_THAT(b->bags(), ElementsAre(ElementsAre(0, 1, 2), ElementsAre(3, 4)));
  EXPECT_DOUBLE_EQ(KMeansObjective1d(Span(values), *b), 0.0);
}

TEST(LabelKMeansMinSizeTest, FewerThanTwoKGivesOneBag) {
  Rng rng(1);
  for (int n = 3; n < 6; ++n) {
    std::vector<double> values(static_cast<size_t>(n));
    for (double& v : values) v = rng.Gaussian();
    EXPECT_EQ(LabelKMeansMinSize(values, 3)->num_bags(), 1);
  }
}

TEST(LabelKMeansMinSizeTest, TooFewPoints) {
  absl::StatusOr<Bagging> b = LabelKMeansMinSize(std::vector<double>{1, 2}, 3);
  ASSERT_FALSE(b.ok());
  EXPECT_THAT(std::string(b.status().message()), HasSubstr("TooFewPoints"));
}

TEST(LabelKMeansMinSizeTest, SevenPointsMatchEnumeration) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> values(7);
    for (double& v : values) v = rng.Gaussian();
    const Bagging b = *LabelKMeansMinSize(values, 2);
    EXPECT_NEAR(KMeansObjective1d(Span(values), b), EnumerateOptimum(values, 2, false),
                1e-9);
    for (int l = 0; l < b.num_bags(); ++l) EXPECT_GE(b.bag_size(l), 2);
  }
}

// Property sweep: no feasible partition beats either solver.
TEST(LabelKMeansPropertyTest, OptimalOnAllSmallInstances) {
  Rng rng(3);
  for (const int k : {2, 3}) {
    for (int n = k; n <= 8; ++n) {
      for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> values(static_cast<size_t>(n));
        for (double& v : values) v = std::round(4 * rng.Gaussian()) / 2;  // ties
        EXPECT_NEAR(KMeansObjective1d(Span(values), *LabelKMeansMinSize(values, k)),
                    EnumerateOptimum(values, k, false), 1e-9);
        if (n % k == 0) {
          EXPECT_NEAR(KMeansObjective1d(Span(values), *LabelKMeansEqual(values, k)),
                      EnumerateOptimum(values, k, true), 1e-9);
        }
      }
    }
  }
}

TEST(LabelKMeansPropertyTest, MinSizeNeverWorseThanEqual) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const VectorXd v = RandomVector(60, rng);
    EXPECT_LE(KMeansObjective1d(v, *LabelKMeansMinSize(Span(v), 5)),
              KMeansObjective1d(v, *LabelKMeansEqual(Span(v), 5)) + 1e-12);
  }
}

TEST(InstanceKMeansTest, SquareCornersPairNearestNeighbours) {
  MatrixXd x(4, 2);
  x << 0, 0, 0, 1, 5, 0, 5, 1;
  Rng rng(5);
  absl::StatusOr<Bagging> b = InstanceKMeansBalanced(x, 2, rng);
  ASSERT_TRUE(b.ok()) << b.status();
  EXPECT_THAT(b->bags(), ElementsAre(ElementsAre(0, 1), ElementsAre(2, 3)));
  // The three pairings have objectives 1, 50 and 51; random bagging averages 34.
  EXPECT_DOUBLE_EQ(KMeansObjective(x, *b), 1.0);
}

TEST(InstanceKMeansTest, IdenticalPointsGiveZeroObjective) {
  const MatrixXd x = MatrixXd::Constant(12, 3, 1.5);
  Rng rng(6);
  const Bagging b = *InstanceKMeansBalanced(x, 3, rng);
  EXPECT_TRUE(b.equal_sized());
  EXPECT_EQ(b.num_bags(), 4);
  EXPECT_DOUBLE_EQ(KMeansObjective(x, b), 0.0);
}

TEST(InstanceKMeansTest, OneDimensionalFarBelowRandom) {
  // The heuristic is not exact in 1D; it must land between the sorted-chunk
  // optimum and a small fraction of the random-bag objective.
  Rng rng(7);
  const MatrixXd x = RandomMatrix(1000, 1, rng);
  const Bagging b = *InstanceKMeansBalanced(x, 10, rng);
  const VectorXd v = x.col(0);
  const double exact = KMeansObjective1d(v, *LabelKMeansEqual(Span(v), 10));
  const double random = KMeansObjective(x, *RandomBagging(1000, 10, rng));
  EXPECT_GE(KMeansObjective(x, b), exact - 1e-9);
  EXPECT_LE(KMeansObjective(x, b), 0.05 * random);
}

TEST(InstanceKMeansTest, BalancedValidAndBetterThanRandom) {
  Rng rng(8);
  const MatrixXd x = RandomMatrix(600, 4, rng);
  const Bagging b = *InstanceKMeansBalanced(x, 6, rng);
  ExpectPartition(b, 600);
  for (int l = 0; l < b.num_bags(); ++l) EXPECT_EQ(b.bag_size(l), 6);
  EXPECT_LT(KMeansObjective(x, b), 0.8 * KMeansObjective(x, *RandomBagging(600, 6, rng)));
}

TEST(InstanceKMeansTest, DeterministicGivenSeed) {
  Rng data_rng(9);
  const MatrixXd x = RandomMatrix(300, 3, data_rng);
  Rng a(10);
  Rng b(10);
  EXPECT_EQ(*InstanceKMeansBalanced(x, 5, a), *InstanceKMeansBalanced(x, 5, b));
}

TEST(InstanceKMeansTest, NotDivisible) {
  Rng rng(11);
  EXPECT_FALSE(InstanceKMeansBalanced(MatrixXd::Zero(10, 2), 3, rng).ok());
}

TEST(ScaledInstanceKMeansTest, IdentityCovarianceMatchesPlain) {
  Rng data_rng(12);
  const MatrixXd x = RandomMatrix(200, 3, data_rng);
  Rng a(13);
  Rng b(13);
  EXPECT_EQ(*ScaledInstanceKMeans(x, MatrixXd::Identity(3, 3), 4, a),
            *InstanceKMeansBalanced(x, 4, b));
}

TEST(ScaledInstanceKMeansTest, WhitenedObjectiveNoWorseThanUnscaled) {
  // Two clusters separated along the low-variance axis.
  Rng rng(14);
  constexpr int kN = 400;
  MatrixXd x(kN, 2);
  for (int i = 0; i < kN; ++i) {
    x(i, 0) = 10.0 * rng.Gaussian();
    x(i, 1) = (i % 2 == 0 ? 1.5 : -1.5) + 0.3 * rng.Gaussian();
  }
  MatrixXd cov = MatrixXd::Zero(2, 2);
  cov(0, 0) = 100.0;
  cov(1, 1) = 1.0;
  const MatrixXd white = *WhitenFeatures(x, cov);
  Rng a(15);
  Rng b(15);
  const Bagging scaled = *ScaledInstanceKMeans(x, cov, 4, a);
  const Bagging plain = *InstanceKMeansBalanced(x, 4, b);
  EXPECT_LE(KMeansObjective(white, scaled), KMeansObjective(white, plain));
}

TEST(ScaledInstanceKMeansTest, WhiteningGivesIdentityCovariance) {
  Rng rng(16);
  MatrixXd m(3, 3);
  m << 2, 0.5, 0, 0, 1, 0.3, 0.1, 0, 0.5;
  const MatrixXd x = RandomMatrix(10000, 3, rng) * m;
  const MatrixXd white = *WhitenFeatures(x, m.transpose() * m);
  const MatrixXd centered = white.rowwise() - white.colwise().mean();
  const MatrixXd cov = centered.transpose() * centered / (white.rows() - 1.0);
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov - MatrixXd::Identity(3, 3));
  EXPECT_LT(eig.eigenvalues().cwiseAbs().maxCoeff(), 0.1);
}

TEST(ScaledInstanceKMeansTest, SingularCovariance) {
  Rng rng(17);
  MatrixXd cov = MatrixXd::Identity(2, 2);
  cov(1, 1) = 0.0;
  absl::StatusOr<Bagging> b = ScaledInstanceKMeans(RandomMatrix(10, 2, rng), cov, 2, rng);
  ASSERT_FALSE(b.ok());
  EXPECT_THAT(std::string(b.status().message()), HasSubstr("SingularCovariance"));
}

TEST(RandomBaggingTest, ExtremeSizes) {
  Rng rng(18);
  EXPECT_EQ(RandomBagging(6, 6, rng)->num_bags(), 1);
  EXPECT_EQ(RandomBagging(6, 1, rng)->num_bags(), 6);
  EXPECT_FALSE(RandomBagging(7, 2, rng).ok());
}

TEST(RandomBaggingTest, PairingsAreUniform) {
  Rng rng(19);
  constexpr int kDraws = 10000;
  std::map<int, int> counts;  // keyed by 0's partner
  for (int i = 0; i < kDraws; ++i) {
    const Bagging b = *RandomBagging(4, 2, rng);
    ++counts[b.bag(0)[1]];
  }
  ASSERT_EQ(counts.size(), 3u);
  const double se = std::sqrt(kDraws * (1.0 / 3) * (2.0 / 3));
  for (const auto& [partner, count] : counts) EXPECT_NEAR(count, kDraws / 3.0, 4 * se);
}

TEST(SuperBagRandomTest, OneSuperBag) {
  Rng rng(20);
  const SubsetBagging s = *SuperBagRandom(6, 3, rng);
  EXPECT_EQ(s.bagging.num_bags(), 1);
  EXPECT_EQ(s.instances.size(), 3u);
  EXPECT_EQ(s.unused.size(), 3u);
  ASSERT_EQ(s.superbags.size(), 1u);
  EXPECT_EQ(s.superbags[0].size(), 6u);
}

TEST(SuperBagRandomTest, MarginalInclusionIsHalf) {
  Rng rng(21);
  constexpr int kDraws = 10000;
  constexpr int kN = 12;
  std::vector<int> included(kN, 0);
  for (int i = 0; i < kDraws; ++i) {
    const SubsetBagging s = *SuperBagRandom(kN, 3, rng);
    for (const int id : s.instances) ++included[static_cast<size_t>(id)];
  }
  const double se = std::sqrt(kDraws * 0.25);
  for (const int c : included) EXPECT_NEAR(c, kDraws / 2.0, 4 * se);
}

TEST(SuperBagRandomTest, CoOccurrenceWithinSuperBag) {
  // Given that two members share a super-bag and the first is drawn, the
  // second is drawn with probability (k - 1) / (2k - 1).
  constexpr int kK = 3;
  Rng rng(22);
  int both = 0;
  int first = 0;
  for (int draw = 0; draw < 20000; ++draw) {
    const SubsetBagging s = *SuperBagRandom(2 * kK, kK, rng);
    const std::set<int> chosen(s.instances.begin(), s.instances.end());
    if (chosen.count(0)) {
      ++first;
      both += chosen.count(1);
    }
  }
  const double p = (kK - 1.0) / (2 * kK - 1.0);
  const double observed = static_cast<double>(both) / first;
  EXPECT_NEAR(observed, p, 4 * std::sqrt(p * (1 - p) / first));
}

TEST(SuperBagRandomTest, ComplementsCoverSuperBags) {
  Rng rng(23);
  const SubsetBagging s = *SuperBagRandom(40, 4, rng);
  const std::vector<std::vector<int>> bags = GlobalBags(s);
  ASSERT_EQ(bags.size(), s.superbags.size());
  for (size_t l = 0; l < bags.size(); ++l) {
    std::vector<int> merged = bags[l];
    merged.insert(merged.end(), s.complement_bags[l].begin(), s.complement_bags[l].end());
    std::sort(merged.begin(), merged.end());
    std::vector<int> super = s.superbags[l];
    std::sort(super.begin(), super.end());
    EXPECT_EQ(merged, super);
  }
  EXPECT_FALSE(SuperBagRandom(10, 3, rng).ok());
}

TEST(SuperBagSortedTest, FourPointsKOne) {
  const std::vector<double> values = {3.0, 0.0, 2.0, 1.0};
  Rng rng(24);
  const SubsetBagging s = *SuperBagSortedAggMir(values, 1, rng);
  ASSERT_EQ(s.superbags.size(), 2u);
  EXPECT_THAT(s.superbags[0], UnorderedElementsAre(1, 3));
  EXPECT_THAT(s.superbags[1], UnorderedElementsAre(0, 2));
  const std::vector<std::vector<int>> bags = GlobalBags(s);
  ASSERT_EQ(bags.size(), 2u);
  const std::set<int> low = {1, 3};
  const std::set<int> high = {0, 2};
  int from_low = 0;
  int from_high = 0;
  for (const auto& bag : bags) {
    ASSERT_EQ(bag.size(), 1u);
    from_low += low.count(bag[0]);
    from_high += high.count(bag[0]);
  }
  EXPECT_EQ(from_low, 1);
  EXPECT_EQ(from_high, 1);
}

TEST(SuperBagSortedTest, BagRangeWithinSuperBagRange) {
  Rng rng(25);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 1 + rng.UniformInt(4);
    const int n = 2 * k * (1 + rng.UniformInt(5));
    const VectorXd v = RandomVector(n, rng);
    const SubsetBagging s = *SuperBagSortedAggMir(Span(v), k, rng);
    const std::vector<std::vector<int>> bags = GlobalBags(s);
    for (size_t l = 0; l < bags.size(); ++l) {
      auto range = [&](const std::vector<int>& ids) {
        double lo = 1e300;
        double hi = -1e300;
        for (const int i : ids) {
          lo = std::min(lo, v[i]);
          hi = std::max(hi, v[i]);
        }
        return hi - lo;
      };
      const auto owner = std::find_if(
          s.superbags.begin(), s.superbags.end(), [&](const std::vector<int>& g) {
            return std::find(g.begin(), g.end(), bags[l].front()) != g.end();
          });
      ASSERT_NE(owner, s.superbags.end());
      ASSERT_LE(range(bags[l]), range(*owner));
    }
  }
}

TEST(SuperBagSortedTest, ConstantValuesStillValid) {
  Rng rng(26);
  const std::vector<double> values(20, 1.0);
  const SubsetBagging s = *SuperBagSortedAggMir(values, 5, rng);
  EXPECT_EQ(s.bagging.num_bags(), 2);
  EXPECT_EQ(s.unused.size(), 10u);
}

TEST(BuildBaggingTest, EveryMethodReturnsAPartition) {
  Rng rng(27);
  const MatrixXd x = RandomMatrix(120, 3, rng);
  const VectorXd y = RandomVector(120, rng);
  const MatrixXd cov = MatrixXd::Identity(3, 3);
  BaggingRequest request;
  request.k = 5;
  request.covariance = &cov;
  for (const BaggingMethod method :
       {BaggingMethod::kInstanceKMeans, BaggingMethod::kScaledInstanceKMeans,
        BaggingMethod::kLabelKMeans, BaggingMethod::kRandom,
        BaggingMethod::kSuperBagRandom, BaggingMethod::kSuperBagSorted}) {
    absl::StatusOr<SubsetBagging> s = BuildBagging(method, x, y, request, rng);
    ASSERT_TRUE(s.ok()) << BaggingMethodName(method) << ": " << s.status();
    ExpectPartition(s->bagging, static_cast<int>(s->instances.size()));
    EXPECT_EQ(s->instances.size() + s->unused.size(), 120u);
    EXPECT_EQ(*ParseBaggingMethod(BaggingMethodName(method)), method);
  }
  EXPECT_TRUE(IsLabelDependent(BaggingMethod::kLabelKMeans));
  EXPECT_TRUE(IsLabelDependent(BaggingMethod::kSuperBagSorted));
  EXPECT_FALSE(IsLabelDependent(BaggingMethod::kInstanceKMeans));
  EXPECT_FALSE(ParseBaggingMethod("kmeans").ok());
}

TEST(BuildBaggingTest, ScaledNeedsCovariance) {
  Rng rng(28);
  BaggingRequest request;
  request.k = 2;
  EXPECT_FALSE(BuildBagging(BaggingMethod::kScaledInstanceKMeans, RandomMatrix(8, 2, rng),
                            RandomVector(8, rng), request, rng)
                   .ok());
}

}  // namespace
}  // namespace optbag
