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

#include "optbag/bounds.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "optbag/linalg.h"

namespace optbag {
namespace {

// Eigenvalues of a Gram matrix below this fraction of the largest one (the
// square of the singular-value rank threshold) mean rank loss.
constexpr double kGramRankThreshold = kRankThreshold * kRankThreshold;

absl::StatusOr<double> InverseLambdaMinOfX(const MatrixXd& features) {
  if (features.rows() < features.cols()) {
    return absl::FailedPreconditionError("RankDeficient: n < d");
  }
  const EigenRange range =
      SymmetricEigenRange(MatrixXd(features.transpose() * features));
  if (!(range.min > kGramRankThreshold * range.max)) {
    return absl::FailedPreconditionError(
        absl::StrCat("RankDeficient: lambda_min(X^T X)=", range.min));
  }
  return 1.0 / range.min;
}

absl::Status CheckRows(const MatrixXd& features, const Bagging& bagging) {
  if (features.rows() != bagging.num_instances()) {
    return absl::InvalidArgumentError("features and bagging disagree on n");
  }
  return absl::OkStatus();
}

double KMeansOfIndices(std::span<const double> values,
                       std::span<const int> members) {
  double mean = 0.0;
  for (const int i : members) mean += values[static_cast<size_t>(i)];
  mean /= static_cast<double>(members.size());
  double loss = 0.0;
  for (const int i : members) {
    const double diff = values[static_cast<size_t>(i)] - mean;
    loss += diff * diff;
  }
  return loss;
}

}  // namespace

absl::StatusOr<SpectralSummary> GramSpectrum(const MatrixXd& a) {
  if (a.rows() < a.cols()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "DegenerateSpectrum: ", a.rows(), " rows < ", a.cols(), " columns"));
  }
  const EigenRange range = SymmetricEigenRange(MatrixXd(a.transpose() * a));
  if (!(range.min > 1e-12 * range.max)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "DegenerateSpectrum: lambda_min=", range.min, " lambda_max=", range.max));
  }
  SpectralSummary out;
  out.lambda_max = range.max;
  out.lambda_min = range.min;
  out.condition_number = range.max / range.min;
  out.op_norm_pinv = 1.0 / std::sqrt(range.min);
  return out;
}

absl::StatusOr<SpectralSummary> CentroidSpectrum(const MatrixXd& features,
                                                 const Bagging& bagging) {
  if (absl::Status s = CheckRows(features, bagging); !s.ok()) return s;
  return GramSpectrum(BagMeans(bagging, features));
}

absl::StatusOr<double> InstanceMirBound(const MatrixXd& features,
                                        const VectorXd& expected_labels,
                                        double sigma, const Bagging& bagging) {
  if (absl::Status s = CheckRows(features, bagging); !s.ok()) return s;
  absl::StatusOr<double> op2 = InverseLambdaMinOfX(features);
  if (!op2.ok()) return op2.status();
  const double kmeans = KMeansObjective1d(expected_labels, bagging);
  return *op2 * (2.0 * kmeans + sigma * sigma * features.cols());
}

absl::StatusOr<double> BagLlpBound(const MatrixXd& features, double sigma,
                                   const Bagging& bagging) {
  absl::StatusOr<SpectralSummary> spectrum = CentroidSpectrum(features, bagging);
  if (!spectrum.ok()) return spectrum.status();
  double inverse_sizes = 0.0;
  for (int l = 0; l < bagging.num_bags(); ++l) {
    inverse_sizes += 1.0 / bagging.bag_size(l);
  }
  const double cond = spectrum->condition_number;
  return sigma * sigma * cond * cond * inverse_sizes;
}

absl::StatusOr<double> BagLlpExpectedError(const MatrixXd& features,
                                           double sigma,
                                           const Bagging& bagging) {
  if (absl::Status s = CheckRows(features, bagging); !s.ok()) return s;
  const MatrixXd centroids = BagMeans(bagging, features);
  absl::StatusOr<NormalEquationsSolver> solver =
      NormalEquationsSolver::Create(centroids);
  if (!solver.ok()) return solver.status();
  // Column l of G^{-1} (SX)^T (S S^T)^{1/2} is G^{-1} c_l / sqrt(|B_l|).
  double frobenius2 = 0.0;
  for (int l = 0; l < bagging.num_bags(); ++l) {
    const VectorXd column = solver->SolveNormal(centroids.row(l).transpose());
    frobenius2 += column.squaredNorm() / bagging.bag_size(l);
  }
  return sigma * sigma * frobenius2;
}

absl::StatusOr<double> AggMirBound(const MatrixXd& features,
                                   const VectorXd& expected_labels,
                                   double sigma, const Bagging& bagging) {
  absl::StatusOr<SpectralSummary> spectrum = CentroidSpectrum(features, bagging);
  if (!spectrum.ok()) return spectrum.status();
  if (expected_labels.size() != features.rows()) {
    return absl::InvalidArgumentError("expected_labels length differs from n");
  }
  double bracket = sigma * sigma * static_cast<double>(features.rows());
  for (int l = 0; l < bagging.num_bags(); ++l) {
    const double size = bagging.bag_size(l);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const int i : bagging.bag(l)) {
      sum += expected_labels[i];
      sum_sq += expected_labels[i] * expected_labels[i];
    }
    bracket += sum_sq / size - (sum / size) * (sum / size);
  }
  return spectrum->op_norm_pinv * spectrum->op_norm_pinv * bracket;
}

absl::StatusOr<ChernoffFloor> ChernoffEigenFloor(const MatrixXd& features,
                                                 int k, double delta,
                                                 double sigma) {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1)");
  }
  if (k < 1) return absl::InvalidArgumentError("k must be positive");
  absl::StatusOr<SpectralSummary> spectrum = GramSpectrum(features);
  if (!spectrum.ok()) return spectrum.status();
  const double n = static_cast<double>(features.rows());
  const double d = static_cast<double>(features.cols());
  const double kk = static_cast<double>(k) * k;
  ChernoffFloor out;
  out.mu_min = spectrum->lambda_min / (4.0 * kk);
  out.beta = features.rowwise().squaredNorm().maxCoeff();
  out.floor = (1.0 - delta) * out.mu_min;
  // log of e^-delta / (1 - delta)^(1 - delta), negative for delta in (0, 1).
  const double log_base = -delta - (1.0 - delta) * std::log1p(-delta);
  out.failure_prob = d * std::exp(log_base * out.mu_min / (k * out.beta));
  const double cond = spectrum->condition_number;
  out.error_cap = 16.0 * sigma * sigma * n * kk * cond * cond /
                  ((1.0 - delta) * (1.0 - delta));
  return out;
}

absl::StatusOr<SuperBagDeltaValue> SuperBagDelta(std::span<const double> values,
                                                 std::span<const int> half1,
                                                 std::span<const int> half2) {
  if (half1.empty() || half1.size() != half2.size()) {
    return absl::InvalidArgumentError(
        "invalid split: halves must be nonempty and of equal size");
  }
  std::vector<int> all(half1.begin(), half1.end());
  all.insert(all.end(), half2.begin(), half2.end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end() ||
      all.front() < 0 || all.back() >= static_cast<int>(values.size())) {
    return absl::InvalidArgumentError(
        "invalid split: halves overlap or index out of range");
  }
  const double k = static_cast<double>(half1.size());
  double sum1 = 0.0;
  double sum2 = 0.0;
  for (const int i : half1) sum1 += values[static_cast<size_t>(i)];
  for (const int i : half2) sum2 += values[static_cast<size_t>(i)];
  SuperBagDeltaValue out;
  out.closed_form = (sum1 - sum2) * (sum1 - sum2) / (2.0 * k);
  out.direct = KMeansOfIndices(values, all) - KMeansOfIndices(values, half1) -
               KMeansOfIndices(values, half2);
  return out;
}

absl::StatusOr<VarianceDecomposition> VarianceDecompositionCheck(
    const MatrixXd& centered_features, const Bagging& bagging,
    const VectorXd& direction) {
  if (absl::Status s = CheckRows(centered_features, bagging); !s.ok()) return s;
  if (direction.size() != centered_features.cols()) {
    return absl::InvalidArgumentError("direction has the wrong length");
  }
  if (!bagging.equal_sized()) {
    return absl::InvalidArgumentError("bags must have equal sizes");
  }
  const double n = static_cast<double>(centered_features.rows());
  for (int j = 0; j < centered_features.cols(); ++j) {
    const double mean = centered_features.col(j).sum() / n;
    const double scale =
        std::max(centered_features.col(j).cwiseAbs().maxCoeff(), 1e-300);
    if (std::abs(mean) > 1e-9 * scale) {
      return absl::InvalidArgumentError(
          absl::StrCat("UncenteredInput: column ", j, " has mean ", mean));
    }
  }
  const double k = bagging.bag_size(0);
  const VectorXd projected = centered_features * direction;
  const VectorXd centroid_projection = BagMeans(bagging, projected);
  VarianceDecomposition out;
  out.centroid_variance = centroid_projection.squaredNorm();
  const double total = projected.squaredNorm();
  out.predicted = (total - KMeansObjective1d(projected, bagging)) / k;
  out.residual = std::abs(out.centroid_variance - out.predicted);
  out.relative = total > 0.0 ? out.residual / total : out.residual;
  return out;
}

}  // namespace optbag
