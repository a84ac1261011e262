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

#ifndef OPTBAG_BOUNDS_H_
#define OPTBAG_BOUNDS_H_

#include <span>

#include "absl/status/statusor.h"
#include "optbag/data_model.h"

namespace optbag {

// Spectrum of a Gram matrix A^T A.
struct SpectralSummary {
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  double condition_number = 0.0;  // lambda_max / lambda_min
  double op_norm_pinv = 0.0;      // ||(A^T A)^{-1} A^T||_op = lambda_min^{-1/2}
};

// Spectrum of A^T A. "DegenerateSpectrum" (FailedPrecondition) when
// lambda_min <= 1e-12 lambda_max or A has fewer rows than columns.
absl::StatusOr<SpectralSummary> GramSpectrum(const MatrixXd& a);

// Spectrum of (S X)^T (S X), the Gram matrix of the bag centroids. Its
// nonzero eigenvalues are those of the m x m centroid Gram g g^T.
absl::StatusOr<SpectralSummary> CentroidSpectrum(const MatrixXd& features,
                                                 const Bagging& bagging);

// ||(X^T X)^{-1} X^T||^2_op (2 kmeans(ytilde) + sigma^2 d).
// "RankDeficient" when rank(X) < d.
absl::StatusOr<double> InstanceMirBound(const MatrixXd& features,
                                        const VectorXd& expected_labels,
                                        double sigma, const Bagging& bagging);

// sigma^2 cond((SX)^T SX)^2 sum_l 1/|B_l|.
absl::StatusOr<double> BagLlpBound(const MatrixXd& features, double sigma,
                                   const Bagging& bagging);

// Exact E||theta_hat - theta*||^2 of the bag-LLP estimator:
// sigma^2 ||G^{-1} (SX)^T (S S^T)^{1/2}||_F^2 with G = (SX)^T SX.
absl::StatusOr<double> BagLlpExpectedError(const MatrixXd& features,
                                           double sigma,
                                           const Bagging& bagging);

// ||G^{-1}(SX)^T||^2_op (sum_l sum_{B_l} ytilde^2/|B_l|
//                        - sum_l (sum_{B_l} ytilde / |B_l|)^2 + sigma^2 n).
absl::StatusOr<double> AggMirBound(const MatrixXd& features,
                                   const VectorXd& expected_labels,
                                   double sigma, const Bagging& bagging);

// Minimum-eigenvalue guarantee for the random super-bag construction.
struct ChernoffFloor {
  double mu_min = 0.0;        // lambda_min(X^T X) / (4 k^2)
  double beta = 0.0;          // max_i ||x_i||^2
  double floor = 0.0;         // (1 - delta) mu_min
  double failure_prob = 0.0;  // d [e^-delta / (1-delta)^(1-delta)]^(mu_min / (k beta))
  double error_cap = 0.0;     // 16 sigma^2 n k^2 cond(X^T X)^2 / (1 - delta)^2
};

// Requires 0 < delta < 1, k >= 1 and rank(X) = d.
absl::StatusOr<ChernoffFloor> ChernoffEigenFloor(const MatrixXd& features,
                                                 int k, double delta,
                                                 double sigma = 0.0);

// Loss change from splitting a 2k super-bag into two k halves.
struct SuperBagDeltaValue {
  double closed_form = 0.0;  // (sum(half1) - sum(half2))^2 / (2k)
  double direct = 0.0;       // kmeans(super-bag) - kmeans(half1) - kmeans(half2)
};

// The halves must be disjoint, nonempty, of equal size, and index `values`.
absl::StatusOr<SuperBagDeltaValue> SuperBagDelta(std::span<const double> values,
                                                 std::span<const int> half1,
                                                 std::span<const int> half2);

struct VarianceDecomposition {
  double centroid_variance = 0.0;  // sum_l (mu_l . z)^2
  double predicted = 0.0;          // (Var(X z) - kmeans(X z)) / k
  double residual = 0.0;           // |centroid_variance - predicted|
  double relative = 0.0;           // residual / Var(X z)
};

// Directional variance of the bag centroids against the prediction from the
// instance variance and the directional k-means loss, for equal bags of k.
// Var(v) = sum_i v_i^2 on centered data. "UncenteredInput" when a column
// mean exceeds 1e-9 times the column scale.
absl::StatusOr<VarianceDecomposition> VarianceDecompositionCheck(
    const MatrixXd& centered_features, const Bagging& bagging,
    const VectorXd& direction);

}  // namespace optbag

#endif  // OPTBAG_BOUNDS_H_
