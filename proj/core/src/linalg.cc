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

#include "optbag/linalg.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace optbag {

using Eigen::MatrixXd;
using Eigen::VectorXd;

absl::StatusOr<NormalEquationsSolver> NormalEquationsSolver::Create(
    const MatrixXd& a) {
  if (a.rows() < a.cols()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "RankDeficient: ", a.rows(), " rows cannot determine ", a.cols(),
        " coefficients"));
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(a);
  qr.setThreshold(kRankThreshold);
  if (qr.rank() < a.cols() || !a.allFinite()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "RankDeficient: rank ", qr.rank(), " < ", a.cols()));
  }
  return NormalEquationsSolver(std::move(qr));
}

VectorXd NormalEquationsSolver::SolveNormal(const VectorXd& rhs) const {
  // A P = Q R, so A^T A = P R^T R P^T.
  const int d = cols();
  const auto r = qr_.matrixR().topLeftCorner(d, d).triangularView<Eigen::Upper>();
  VectorXd z = qr_.colsPermutation().transpose() * rhs;
  r.transpose().solveInPlace(z);
  r.solveInPlace(z);
  return qr_.colsPermutation() * z;
}

VectorXd NormalEquationsSolver::SolveLeastSquares(const VectorXd& b) const {
  return qr_.solve(b);
}

EigenRange SymmetricEigenRange(const MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(symmetric,
                                                 Eigen::EigenvaluesOnly);
  const VectorXd& values = solver.eigenvalues();
  return {values.minCoeff(), values.maxCoeff()};
}

double SpectralNorm(const MatrixXd& matrix) {
  if (matrix.size() == 0) return 0.0;
  // Eigenvalues of the smaller Gram matrix.
  const MatrixXd gram = matrix.rows() >= matrix.cols()
                            ? MatrixXd(matrix.transpose() * matrix)
                            : MatrixXd(matrix * matrix.transpose());
  return std::sqrt(std::max(0.0, SymmetricEigenRange(gram).max));
}

absl::StatusOr<MatrixXd> InverseSqrtSpd(const MatrixXd& spd) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(spd);
  const VectorXd& values = solver.eigenvalues();
  if (values.minCoeff() <= 1e-10 * values.maxCoeff()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "SingularCovariance: lambda_min=", values.minCoeff(),
        " lambda_max=", values.maxCoeff()));
  }
  const MatrixXd& vectors = solver.eigenvectors();
  return vectors * values.cwiseSqrt().cwiseInverse().asDiagonal() *
         vectors.transpose();
}

}  // namespace optbag
