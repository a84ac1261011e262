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

#ifndef OPTBAG_LINALG_H_
#define OPTBAG_LINALG_H_

#include "Eigen/Dense"
#include "absl/status/statusor.h"

namespace optbag {

// Pivots below this fraction of the largest pivot count as rank loss.
inline constexpr double kRankThreshold = 1e-10;

// Column-pivoted QR of a tall matrix A, used to solve the normal equations
// (A^T A) x = r as two triangular solves against R without forming A^T A or
// an inverse.
class NormalEquationsSolver {
 public:
  // "RankDeficient" (FailedPrecondition) when rank(A) < cols(A).
  static absl::StatusOr<NormalEquationsSolver> Create(const Eigen::MatrixXd& a);

  // Solves (A^T A) x = rhs.
  Eigen::VectorXd SolveNormal(const Eigen::VectorXd& rhs) const;

  // Least-squares solution of A x ~= b.
  Eigen::VectorXd SolveLeastSquares(const Eigen::VectorXd& b) const;

  int cols() const { return static_cast<int>(qr_.cols()); }

 private:
  explicit NormalEquationsSolver(Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr)
      : qr_(std::move(qr)) {}

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
};

struct EigenRange {
  double min = 0.0;
  double max = 0.0;
};

// Extreme eigenvalues of a symmetric matrix.
EigenRange SymmetricEigenRange(const Eigen::MatrixXd& symmetric);

// Largest singular value.
double SpectralNorm(const Eigen::MatrixXd& matrix);

// Symmetric inverse square root of an SPD matrix via its eigendecomposition.
// "SingularCovariance" (InvalidArgument) when lambda_min <= 1e-10 lambda_max.
absl::StatusOr<Eigen::MatrixXd> InverseSqrtSpd(const Eigen::MatrixXd& spd);

}  // namespace optbag

#endif  // OPTBAG_LINALG_H_
