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

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace optbag {

absl::Status ValidateDataset(const Dataset& dataset) {
  const int n = dataset.n();
  const int d = dataset.d();
  if (n < 1 || d < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("Dataset needs n >= 1 and d >= 1, got ", n, " x ", d));
  }
  if (dataset.labels.size() != n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "labels has length ", dataset.labels.size(), ", expected ", n));
  }
  if (dataset.noise_sigma < 0.0) {
    return absl::InvalidArgumentError("noise_sigma must be nonnegative");
  }
  if (dataset.expected_labels && dataset.expected_labels->size() != n) {
    return absl::InvalidArgumentError("expected_labels length mismatch");
  }
  if (dataset.theta_star && dataset.theta_star->size() != d) {
    return absl::InvalidArgumentError("theta_star length mismatch");
  }
  if (dataset.expected_labels && dataset.theta_star) {
    const VectorXd implied = dataset.features * *dataset.theta_star;
    const double scale = std::max(1.0, implied.norm());
    if ((implied - *dataset.expected_labels).norm() > 1e-12 * scale) {
      return absl::InvalidArgumentError(
          "expected_labels disagrees with features * theta_star");
    }
  }
  return absl::OkStatus();
}

Dataset RestrictDataset(const Dataset& dataset,
                        std::span<const int> instances) {
  const int count = static_cast<int>(instances.size());
  Dataset out;
  out.features.resize(count, dataset.d());
  out.labels.resize(count);
  if (dataset.expected_labels) out.expected_labels = VectorXd(count);
  for (int r = 0; r < count; ++r) {
    const int i = instances[static_cast<size_t>(r)];
    out.features.row(r) = dataset.features.row(i);
    out.labels[r] = dataset.labels[i];
    if (dataset.expected_labels) {
      (*out.expected_labels)[r] = (*dataset.expected_labels)[i];
    }
  }
  out.theta_star = dataset.theta_star;
  out.noise_sigma = dataset.noise_sigma;
  return out;
}

absl::StatusOr<Bagging> Bagging::FromAssignment(
    std::span<const int> assignment, int min_size) {
  if (min_size < 1) {
    return absl::InvalidArgumentError("min_size must be positive");
  }
  if (assignment.empty()) {
    return absl::InvalidArgumentError("assignment is empty");
  }
  const int num_bags =
      *std::max_element(assignment.begin(), assignment.end()) + 1;
  std::vector<std::vector<int>> bags(static_cast<size_t>(std::max(num_bags, 0)));
  for (size_t i = 0; i < assignment.size(); ++i) {
    const int l = assignment[i];
    if (l < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("NonContiguousBagIndex: negative bag index ", l,
                       " at instance ", i));
    }
    bags[static_cast<size_t>(l)].push_back(static_cast<int>(i));
  }
  for (int l = 0; l < num_bags; ++l) {
    const auto& members = bags[static_cast<size_t>(l)];
    if (members.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("NonContiguousBagIndex: bag ", l, " is empty"));
    }
    if (static_cast<int>(members.size()) < min_size) {
      return absl::InvalidArgumentError(absl::StrCat(
          "BagTooSmall(", l, ", ", members.size(), ")"));
    }
  }
  return FromBags(std::move(bags), static_cast<int>(assignment.size()),
                  min_size);
}

absl::StatusOr<Bagging> Bagging::FromBags(std::vector<std::vector<int>> bags,
                                          int n, int min_size) {
  if (min_size < 1) {
    return absl::InvalidArgumentError("min_size must be positive");
  }
  if (n < 1 || bags.empty()) {
    return absl::InvalidArgumentError("Bagging needs n >= 1 and m >= 1");
  }
  std::vector<int> assignment(static_cast<size_t>(n), -1);
  for (size_t l = 0; l < bags.size(); ++l) {
    auto& members = bags[l];
    if (static_cast<int>(members.size()) < min_size) {
      return absl::InvalidArgumentError(
          absl::StrCat("BagTooSmall(", l, ", ", members.size(), ")"));
    }
    std::sort(members.begin(), members.end());
    for (const int i : members) {
      if (i < 0 || i >= n) {
        return absl::InvalidArgumentError(
            absl::StrCat("instance ", i, " out of range [0, ", n, ")"));
      }
      if (assignment[static_cast<size_t>(i)] != -1) {
        return absl::InvalidArgumentError(
            absl::StrCat("instance ", i, " appears in two bags"));
      }
      assignment[static_cast<size_t>(i)] = static_cast<int>(l);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (assignment[static_cast<size_t>(i)] == -1) {
      return absl::InvalidArgumentError(
          absl::StrCat("instance ", i, " is not in any bag"));
    }
  }
  std::sort(bags.begin(), bags.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  Bagging out;
  out.min_size_ = min_size;
  out.bags_ = std::move(bags);
  out.assignment_ = std::move(assignment);
  for (size_t l = 0; l < out.bags_.size(); ++l) {
    for (const int i : out.bags_[l]) {
      out.assignment_[static_cast<size_t>(i)] = static_cast<int>(l);
    }
  }
  return out;
}

bool Bagging::equal_sized() const {
  return std::all_of(bags_.begin(), bags_.end(), [&](const auto& bag) {
    return bag.size() == bags_.front().size();
  });
}

SparseMatrix BaggingMatrix(const Bagging& bagging) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(bagging.num_instances()));
  for (int l = 0; l < bagging.num_bags(); ++l) {
    const double weight = 1.0 / bagging.bag_size(l);
    for (const int i : bagging.bag(l)) triplets.emplace_back(l, i, weight);
  }
  SparseMatrix s(bagging.num_bags(), bagging.num_instances());
  s.setFromTriplets(triplets.begin(), triplets.end());
  return s;
}

SparseMatrix RootBaggingMatrix(const Bagging& bagging) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(bagging.num_instances()));
  for (int l = 0; l < bagging.num_bags(); ++l) {
    const double weight = 1.0 / std::sqrt(static_cast<double>(bagging.bag_size(l)));
    for (const int i : bagging.bag(l)) triplets.emplace_back(l, i, weight);
  }
  SparseMatrix m(bagging.num_bags(), bagging.num_instances());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

SparseMatrix InstanceSmoothingMatrix(const Bagging& bagging) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (int l = 0; l < bagging.num_bags(); ++l) {
    const double weight = 1.0 / bagging.bag_size(l);
    for (const int i : bagging.bag(l)) {
      for (const int j : bagging.bag(l)) triplets.emplace_back(i, j, weight);
    }
  }
  SparseMatrix s(bagging.num_instances(), bagging.num_instances());
  s.setFromTriplets(triplets.begin(), triplets.end());
  return s;
}

MatrixXd BagMeans(const Bagging& bagging, const MatrixXd& features) {
  MatrixXd means = MatrixXd::Zero(bagging.num_bags(), features.cols());
  for (int l = 0; l < bagging.num_bags(); ++l) {
    for (const int i : bagging.bag(l)) means.row(l) += features.row(i);
    means.row(l) /= bagging.bag_size(l);
  }
  return means;
}

VectorXd BagMeans(const Bagging& bagging, const VectorXd& values) {
  VectorXd means = VectorXd::Zero(bagging.num_bags());
  for (int l = 0; l < bagging.num_bags(); ++l) {
    for (const int i : bagging.bag(l)) means[l] += values[i];
    means[l] /= bagging.bag_size(l);
  }
  return means;
}

VectorXd Broadcast(const Bagging& bagging, const VectorXd& bag_values) {
  VectorXd out(bagging.num_instances());
  for (int i = 0; i < bagging.num_instances(); ++i) {
    out[i] = bag_values[bagging.assignment()[static_cast<size_t>(i)]];
  }
  return out;
}

AttributionDraw SampleAttribution(const Bagging& bagging, Rng& rng) {
  AttributionDraw draw;
  draw.chosen.reserve(static_cast<size_t>(bagging.num_bags()));
  for (int l = 0; l < bagging.num_bags(); ++l) {
    const auto members = bagging.bag(l);
    draw.chosen.push_back(
        members[static_cast<size_t>(rng.UniformInt(static_cast<int>(members.size())))]);
  }
  return draw;
}

SparseMatrix AttributionMatrix(const Bagging& bagging,
                               const AttributionDraw& draw) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (int l = 0; l < bagging.num_bags(); ++l) {
    triplets.emplace_back(l, draw.chosen[static_cast<size_t>(l)], 1.0);
  }
  SparseMatrix a(bagging.num_bags(), bagging.num_instances());
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

double KMeansObjective1d(std::span<const double> values,
                         const Bagging& bagging) {
  double total = 0.0;
  for (int l = 0; l < bagging.num_bags(); ++l) {
    double mean = 0.0;
    for (const int i : bagging.bag(l)) mean += values[static_cast<size_t>(i)];
    mean /= bagging.bag_size(l);
    for (const int i : bagging.bag(l)) {
      const double diff = values[static_cast<size_t>(i)] - mean;
      total += diff * diff;
    }
  }
  return total;
}

double KMeansObjective1d(const VectorXd& values, const Bagging& bagging) {
  return KMeansObjective1d(
      std::span<const double>(values.data(), static_cast<size_t>(values.size())),
      bagging);
}

double KMeansObjective(const MatrixXd& features, const Bagging& bagging) {
  const MatrixXd centroids = BagMeans(bagging, features);
  double total = 0.0;
  for (int i = 0; i < bagging.num_instances(); ++i) {
    total += (features.row(i) -
              centroids.row(bagging.assignment()[static_cast<size_t>(i)]))
                 .squaredNorm();
  }
  return total;
}

}  // namespace optbag
