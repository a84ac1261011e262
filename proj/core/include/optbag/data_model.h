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

#ifndef OPTBAG_DATA_MODEL_H_
#define OPTBAG_DATA_MODEL_H_

#include <optional>
#include <span>
#include <vector>

#include "Eigen/Dense"
#include "Eigen/SparseCore"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "optbag/rng.h"

namespace optbag {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Training set for learning from aggregate labels.
//
// `labels` are the observed (noisy) responses y = X theta* + gamma. When the
// data is synthetic, `expected_labels` holds X theta* and `theta_star` the
// generating model.
struct Dataset {
  MatrixXd features;  // n x d
  VectorXd labels;    // n
  std::optional<VectorXd> expected_labels;
  std::optional<VectorXd> theta_star;
  double noise_sigma = 0.0;

  int n() const { return static_cast<int>(features.rows()); }
  int d() const { return static_cast<int>(features.cols()); }
};

// Shape checks, plus expected_labels == features * theta_star (1e-12
// relative) when both are present. Rank is checked at fit time.
absl::Status ValidateDataset(const Dataset& dataset);

// Rows `instances` of `dataset`, in the given order.
Dataset RestrictDataset(const Dataset& dataset, std::span<const int> instances);

// A partition of {0, ..., n-1} into m >= 1 bags, each of size >= min_size.
//
// Bags are canonical: members ascend within a bag, and bags are ordered by
// their smallest member. Two Baggings describing the same partition compare
// equal regardless of how they were built.
class Bagging {
 public:
  // Errors: "BagTooSmall(l, size)" and "NonContiguousBagIndex" as
  // InvalidArgument. `l` refers to the caller's bag index.
  static absl::StatusOr<Bagging> FromAssignment(std::span<const int> assignment,
                                                int min_size);

  // `bags` must partition {0, ..., n-1}.
  static absl::StatusOr<Bagging> FromBags(std::vector<std::vector<int>> bags,
                                          int n, int min_size);

  int num_instances() const { return static_cast<int>(assignment_.size()); }
  int num_bags() const { return static_cast<int>(bags_.size()); }
  int min_size() const { return min_size_; }

  // assignment()[i] is the bag holding instance i.
  const std::vector<int>& assignment() const { return assignment_; }
  const std::vector<std::vector<int>>& bags() const { return bags_; }
  std::span<const int> bag(int l) const { return bags_[static_cast<size_t>(l)]; }
  int bag_size(int l) const { return static_cast<int>(bag(l).size()); }

  // True when every bag has the same size.
  bool equal_sized() const;

  friend bool operator==(const Bagging& a, const Bagging& b) {
    return a.bags_ == b.bags_;
  }

 private:
  Bagging() = default;

  std::vector<int> assignment_;
  std::vector<std::vector<int>> bags_;
  int min_size_ = 1;
};

// Released per-bag labels.
enum class AggregationKind {
  kMirSample,  // label of one uniformly sampled member
  kLlpMean,    // mean of the members' labels
};

struct AggregateLabels {
  VectorXd values;  // length m
  AggregationKind kind = AggregationKind::kLlpMean;
  bool privatized = false;
  double noise_std = 0.0;
};

// Which member releases its label, one per bag.
struct AttributionDraw {
  std::vector<int> chosen;  // chosen[l] is a member of bag l
};

// m x n row-stochastic membership matrix: entry (l, i) = 1/|B_l| for i in B_l.
SparseMatrix BaggingMatrix(const Bagging& bagging);

// m x n matrix with 1/sqrt(|B_l|) on members. Its Gram M^T M is the n x n
// instance smoothing matrix below.
SparseMatrix RootBaggingMatrix(const Bagging& bagging);

// n x n symmetric matrix with entry (i, j) = 1/|B_l| when i, j share bag l.
// This is E[A] for the instance-level attribution matrix.
SparseMatrix InstanceSmoothingMatrix(const Bagging& bagging);

// Per-bag means of the rows of `features` (the product S X, m x d), computed
// by reduction without materializing S.
MatrixXd BagMeans(const Bagging& bagging, const MatrixXd& features);
VectorXd BagMeans(const Bagging& bagging, const VectorXd& values);

// Each instance receives its bag's value: (broadcast)_i = values[bag(i)].
VectorXd Broadcast(const Bagging& bagging, const VectorXd& bag_values);

// One uniformly random member per bag, independent across bags.
AttributionDraw SampleAttribution(const Bagging& bagging, Rng& rng);

// m x n 0/1 matrix selecting the chosen member of each bag. Its expectation
// over SampleAttribution is BaggingMatrix(bagging).
SparseMatrix AttributionMatrix(const Bagging& bagging,
                               const AttributionDraw& draw);

// sum_l sum_{i in B_l} (v_i - mean_l)^2.
double KMeansObjective1d(std::span<const double> values, const Bagging& bagging);
double KMeansObjective1d(const VectorXd& values, const Bagging& bagging);

// sum_l sum_{i in B_l} ||x_i - centroid_l||^2.
double KMeansObjective(const MatrixXd& features, const Bagging& bagging);

}  // namespace optbag

#endif  // OPTBAG_DATA_MODEL_H_
