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

#ifndef OPTBAG_GLM_H_
#define OPTBAG_GLM_H_

#include <optional>
#include <span>
#include <string_view>

#include "absl/status/statusor.h"
#include "optbag/data_model.h"
#include "optbag/estimators.h"
#include "optbag/rng.h"

namespace optbag {

enum class GlmFamilyKind { kGaussian, kLogistic, kPoisson };

std::string_view GlmFamilyName(GlmFamilyKind kind);
absl::StatusOr<GlmFamilyKind> ParseGlmFamily(std::string_view name);

// Canonical exponential family with cumulant b and a_i(phi) = phi / w_i.
//
//   Gaussian  b = eta^2 / 2
//   Logistic  b = log(1 + e^eta)
//   Poisson   b = e^eta, eta clamped to [-30, 30]
class GlmFamily {
 public:
  static constexpr double kPoissonEtaLimit = 30.0;

  // Weights are per instance; empty means unit weights.
  static absl::StatusOr<GlmFamily> Create(GlmFamilyKind kind,
                                          double dispersion = 1.0,
                                          VectorXd weights = {});
  static GlmFamily Gaussian(double dispersion = 1.0) {
    return GlmFamily(GlmFamilyKind::kGaussian, dispersion, {});
  }
  static GlmFamily Logistic() {
    return GlmFamily(GlmFamilyKind::kLogistic, 1.0, {});
  }
  static GlmFamily Poisson() {
    return GlmFamily(GlmFamilyKind::kPoisson, 1.0, {});
  }

  GlmFamilyKind kind() const { return kind_; }
  std::string_view name() const { return GlmFamilyName(kind_); }
  double dispersion() const { return dispersion_; }
  const VectorXd& weights() const { return weights_; }

  double B(double eta) const;
  double BPrime(double eta) const;
  double BDoublePrime(double eta) const;
  VectorXd BPrime(const VectorXd& eta) const;
  VectorXd BDoublePrime(const VectorXd& eta) const;

  // Diagonal of D = Diag(a_i(phi)) for `rows` rows. Weights apply only when
  // their length equals `rows`; otherwise every entry is phi.
  VectorXd DispersionDiagonal(int rows) const;

  // Entries of eta that fall outside the Poisson clamp.
  int ClampedCount(const VectorXd& eta) const;

 private:
  GlmFamily(GlmFamilyKind kind, double dispersion, VectorXd weights)
      : kind_(kind), dispersion_(dispersion), weights_(std::move(weights)) {}

  double Clamp(double eta) const;

  GlmFamilyKind kind_;
  double dispersion_;
  VectorXd weights_;
};

// A generic canonical GLM problem: rows of `design` with responses.
// The negative log-likelihood (up to terms free of theta) is
//   sum_r [b(eta_r) - response_r eta_r] / a_r,  eta = design theta,
// and the score is design^T D^{-1} (response - b'(eta)), its negative
// gradient.
double GlmNegLogLikelihood(const MatrixXd& design, const VectorXd& response,
                           const VectorXd& theta, const GlmFamily& family);
VectorXd GlmScore(const MatrixXd& design, const VectorXd& response,
                  const VectorXd& theta, const GlmFamily& family);
// design^T Diag(b''(eta) / a) design.
MatrixXd GlmHessian(const MatrixXd& design, const VectorXd& theta,
                    const GlmFamily& family);

// X^T D^{-1} (A y - b'(X theta)); `broadcast_labels` is A y (length n).
absl::StatusOr<VectorXd> GlmInstanceMirGradient(const MatrixXd& features,
                                                const Bagging& bagging,
                                                const VectorXd& broadcast_labels,
                                                const VectorXd& theta,
                                                const GlmFamily& family);

// (S X)^T D^{-1} (A y - b'(S X theta)); `bag_labels` has length m.
absl::StatusOr<VectorXd> GlmAggMirGradient(const MatrixXd& features,
                                           const Bagging& bagging,
                                           const VectorXd& bag_labels,
                                           const VectorXd& theta,
                                           const GlmFamily& family);

struct GlmFitOptions {
  int max_iterations = 200;
  // Converged when ||score|| <= gradient_tolerance * rows.
  double gradient_tolerance = 1e-8;
};

struct GlmFit {
  ModelEstimate estimate;
  int iterations = 0;
  double score_norm = 0.0;
  int clamped = 0;  // Poisson linear predictors outside the clamp at theta_hat
};

// Damped Newton with backtracking from theta = 0. "NonConvergence"
// (DeadlineExceeded) after the iteration cap.
absl::StatusOr<GlmFit> FitGlm(const MatrixXd& design, const VectorXd& response,
                              const GlmFamily& family,
                              const GlmFitOptions& options = {});

// Instance-MIR GLM: each instance takes its bag's sampled label.
absl::StatusOr<GlmFit> FitGlmInstanceMir(const MatrixXd& features,
                                         const Bagging& bagging,
                                         const AggregateLabels& labels,
                                         const GlmFamily& family,
                                         const GlmFitOptions& options = {});

// Aggregate-MIR GLM: sampled bag labels against the bag centroids.
absl::StatusOr<GlmFit> FitGlmAggMir(const MatrixXd& features,
                                    const Bagging& bagging,
                                    const AggregateLabels& labels,
                                    const GlmFamily& family,
                                    const GlmFitOptions& options = {});

// ||X^T D^{-1}||^2_op (m (||mu||^2 + ||D b''||_1) + ||(S - I) mu||^2
// - ||S mu||^2) with mu = b'(X theta*) and S the instance smoothing matrix.
// Bounds E||score(theta*)||^2 of the instance-MIR loss.
absl::StatusOr<double> GlmInstanceMirBound(const MatrixXd& features,
                                           const Bagging& bagging,
                                           const VectorXd& theta_star,
                                           const GlmFamily& family);

// ||D^{-1}||^2_op lambda_max(X^T X) (m (||mu||^2 + ||D b''||_1)
// + ||S mu - b'(S X theta*)||^2 - ||S mu||^2) with S the m x n bagging
// matrix. Bounds E||score(theta*)||^2 of the aggregate-MIR loss.
absl::StatusOr<double> GlmAggMirBound(const MatrixXd& features,
                                      const Bagging& bagging,
                                      const VectorXd& theta_star,
                                      const GlmFamily& family);

// ||S b'(X theta) - b'(S X theta)||^2 over the m bags.
double JensenGap(const MatrixXd& features, const Bagging& bagging,
                 const VectorXd& theta, const GlmFamily& family);

// sum_l (max_{B_l} v - min_{B_l} v)^2.
double GlmRangeObjective(std::span<const double> values, const Bagging& bagging);

// Equal bags of k minimizing the range objective: contiguous runs of the
// sorted values.
absl::StatusOr<Bagging> RangeMinimizingBagging(std::span<const double> values,
                                               int k);

enum class GlmLoss { kInstanceMir, kAggMir };

struct StrongConvexityGapResult {
  double lhs = 0.0;  // ||theta_hat - theta*||
  double rhs = 0.0;  // ||score(theta*)|| / mu_hat
  double mu_hat = 0.0;
  // Optional diagnostic: ||score(theta*)|| / L_hat, with L_hat the largest
  // Hessian eigenvalue on the segment.
  double lipschitz_lower = 0.0;
  bool holds() const { return lhs <= rhs; }
};

// mu_hat is the smallest Hessian eigenvalue at 11 evenly spaced points of
// [theta*, theta_hat]. "NonStronglyConvex" (FailedPrecondition) when
// mu_hat <= 1e-10.
absl::StatusOr<StrongConvexityGapResult> StrongConvexityGap(
    const MatrixXd& features, const Bagging& bagging,
    const AggregateLabels& labels, GlmLoss loss, const VectorXd& theta_hat,
    const VectorXd& theta_star, const GlmFamily& family);

// One response per entry of `eta` drawn at mean b'(eta): Gaussian with
// variance a_i, Bernoulli, or Poisson.
VectorXd SampleGlmLabels(const VectorXd& eta, const GlmFamily& family, Rng& rng);

}  // namespace optbag

#endif  // OPTBAG_GLM_H_
