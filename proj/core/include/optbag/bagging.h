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

#ifndef OPTBAG_BAGGING_H_
#define OPTBAG_BAGGING_H_

#include <span>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "optbag/data_model.h"
#include "optbag/rng.h"

namespace optbag {

// Exact equal-size 1d k-means: sort (stable on index), cut into n/k runs of k.
// "NotDivisible(n, k)" when k does not divide n.
absl::StatusOr<Bagging> LabelKMeansEqual(std::span<const double> values, int k);

// Exact 1d k-means over partitions whose bags all have size >= k. Dynamic
// program over contiguous runs of the sorted values with lengths in
// [k, 2k - 1]; a longer run always splits into two feasible runs without
// raising the cost. "TooFewPoints" when n < k.
absl::StatusOr<Bagging> LabelKMeansMinSize(std::span<const double> values,
                                           int k);

struct KMeansOptions {
  int max_iterations = 50;
  // Stop when the objective improves by less than this fraction.
  double tolerance = 1e-4;
  // Nearest centroids remembered per instance. Assignments stay exact: an
  // instance is rescanned against every centroid whenever the remembered
  // list cannot certify its nearest one.
  int candidates = 32;
};

// Balanced instance k-means with m = n/k bags of exactly k.
//
//  1. Farthest-point seeding; the first seed is drawn from `rng`.
//  2. Lloyd iterations (max_iterations, tolerance).
//  3. Capacity-constrained assignment: instances in decreasing order of the
//     gap between their best and second-best centroid each take the nearest
//     centroid that still has room.
//  4. One pass of pairwise swaps between bags that lowers the distance of
//     both instances to the bag centroids.
absl::StatusOr<Bagging> InstanceKMeansBalanced(const MatrixXd& features, int k,
                                               Rng& rng,
                                               const KMeansOptions& options = {});

// Whitens the rows with covariance^{-1/2}. "SingularCovariance" when
// lambda_min <= 1e-10 lambda_max.
absl::StatusOr<MatrixXd> WhitenFeatures(const MatrixXd& features,
                                        const MatrixXd& covariance);

// InstanceKMeansBalanced on the whitened features.
absl::StatusOr<Bagging> ScaledInstanceKMeans(const MatrixXd& features,
                                             const MatrixXd& covariance, int k,
                                             Rng& rng,
                                             const KMeansOptions& options = {});

// Uniform random permutation cut into n/k bags of k.
absl::StatusOr<Bagging> RandomBagging(int n, int k, Rng& rng);

// Bags that cover only part of the data set.
struct SubsetBagging {
  std::vector<int> instances;  // ascending; position p holds instance id
  Bagging bagging;             // partition of {0, ..., instances.size() - 1}
  std::vector<int> unused;     // ascending instance ids outside every bag
  // Super-bag algorithms only: the 2k-sized groups and, for each, the
  // k members that were not drawn.
  std::vector<std::vector<int>> superbags;
  std::vector<std::vector<int>> complement_bags;
};

// The bags of `subset` in instance ids.
std::vector<std::vector<int>> GlobalBags(const SubsetBagging& subset);

// Wraps a full partition.
SubsetBagging WholeDataBagging(Bagging bagging);

// Random partition into n/(2k) super-bags of 2k, each contributing one
// uniformly random k-subset as a bag. Half the instances stay unused.
absl::StatusOr<SubsetBagging> SuperBagRandom(int n, int k, Rng& rng);

// As SuperBagRandom, but the super-bags are contiguous runs of the instances
// sorted by `values`.
absl::StatusOr<SubsetBagging> SuperBagSortedAggMir(std::span<const double> values,
                                                   int k, Rng& rng);

enum class BaggingMethod {
  kInstanceKMeans,
  kScaledInstanceKMeans,
  kLabelKMeans,
  kRandom,
  kSuperBagRandom,
  kSuperBagSorted,
};

std::string_view BaggingMethodName(BaggingMethod method);
absl::StatusOr<BaggingMethod> ParseBaggingMethod(std::string_view name);

// True for methods that read the labels.
bool IsLabelDependent(BaggingMethod method);

struct BaggingRequest {
  int k = 1;
  // Label k-means only: bags of size >= k instead of exactly k.
  bool min_size = false;
  // Required by kScaledInstanceKMeans.
  const MatrixXd* covariance = nullptr;
  KMeansOptions kmeans;
};

// Runs `method`; label-dependent methods use `labels`.
absl::StatusOr<SubsetBagging> BuildBagging(BaggingMethod method,
                                           const MatrixXd& features,
                                           const VectorXd& labels,
                                           const BaggingRequest& request,
                                           Rng& rng);

}  // namespace optbag

#endif  // OPTBAG_BAGGING_H_
