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

#include "optbag/glm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "optbag/bagging.h"
#include "optbag/linalg.h"

namespace optbag {
namespace {

double Sigmoid(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

absl::Status CheckTheta(const MatrixXd& features, const VectorXd& theta) {
  if (theta.size() != features.cols()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "theta has length ", theta.size(), ", expected ", features.cols()));
  }
  return absl::OkStatus();
}

absl::Status CheckBagging(const MatrixXd& features, const Bagging& bagging) {
  if (features.rows() != bagging.num_instances()) {
    return absl::InvalidArgumentError("features and bagging disagree on n");
  }
  return absl::OkStatus();
}

// Knuth's product method for small means, Hormann's PTRS otherwise.
double SamplePoisson(double mean, Rng& rng) {
  if (mean <= 0.0) return 0.0;
  if (mean < 10.0) {
    const double limit = std::exp(-mean);
    double product = rng.Uniform01();
    double count = 0.0;
    while (product > limit) {
      product *= rng.Uniform01();
      count += 1.0;
    }
    return count;
  }
  const double sqrt_mean = std::sqrt(mean);
  const double log_mean = std::log(mean);
  const double b = 0.931 + 2.53 * sqrt_mean;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  while (true) {
    const double u = rng.Uniform01() - 0.5;
    const double v = rng.Uniform01();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * log_mean - std::lgamma(k + 1.0)) {
      return k;
    }
  }
}

}  // namespace

std::string_view GlmFamilyName(GlmFamilyKind kind) {
  switch (kind) {
    case GlmFamilyKind::kGaussian:
      return "gaussian";
    case GlmFamilyKind::kLogistic:
      return "logistic";
    case GlmFamilyKind::kPoisson:
      return "poisson";
  }
  return "unknown";
}

absl::StatusOr<GlmFamilyKind> ParseGlmFamily(std::string_view name) {
  for (const GlmFamilyKind kind : {GlmFamilyKind::kGaussian,
                                   GlmFamilyKind::kLogistic,
                                   GlmFamilyKind::kPoisson}) {
    if (name == GlmFamilyName(kind)) return kind;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown GLM family '", std::string(name), "'"));
}

absl::StatusOr<GlmFamily> GlmFamily::Create(GlmFamilyKind kind,
                                            double dispersion,
                                            VectorXd weights) {
  if (!(dispersion > 0.0) || !std::isfinite(dispersion)) {
    return absl::InvalidArgumentError("dispersion must be positive");
  }
  if (weights.size() > 0 && !(weights.minCoeff() > 0.0)) {
    return absl::InvalidArgumentError("weights must be positive");
  }
  return GlmFamily(kind, dispersion, std::move(weights));
}

double GlmFamily::Clamp(double eta) const {
  return std::clamp(eta, -kPoissonEtaLimit, kPoissonEtaLimit);
}

double GlmFamily::B(double eta) const {
  switch (kind_) {
    case GlmFamilyKind::kGaussian:
      return 0.5 * eta * eta;
    case GlmFamilyKind::kLogistic:
      return eta > 0.0 ? eta + std::log1p(std::exp(-eta))
                       : std::log1p(std::exp(eta));
    case GlmFamilyKind::kPoisson:
      return std::exp(Clamp(eta));
  }
  return 0.0;
}

double GlmFamily::BPrime(double eta) const {
  switch (kind_) {
    case GlmFamilyKind::kGaussian:
      return eta;
    case GlmFamilyKind::kLogistic:
      return Sigmoid(eta);
    case GlmFamilyKind::kPoisson:
      return std::exp(Clamp(eta));
  }
  return 0.0;
}

double GlmFamily::BDoublePrime(double eta) const {
  switch (kind_) {
    case GlmFamilyKind::kGaussian:
      return 1.0;
    case GlmFamilyKind::kLogistic: {
      const double s = Sigmoid(eta);
      return s * (1.0 - s);
    }
    case GlmFamilyKind::kPoisson:
      return std::exp(Clamp(eta));
  }
  return 0.0;
}

VectorXd GlmFamily::BPrime(const VectorXd& eta) const {
  return eta.unaryExpr([this](double e) { return BPrime(e); });
}

VectorXd GlmFamily::BDoublePrime(const VectorXd& eta) const {
  return eta.unaryExpr([this](double e) { return BDoublePrime(e); });
}

VectorXd GlmFamily::DispersionDiagonal(int rows) const {
  if (weights_.size() == rows) return dispersion_ * weights_.cwiseInverse();
  return VectorXd::Constant(rows, dispersion_);
}

int GlmFamily::ClampedCount(const VectorXd& eta) const {
  if (kind_ != GlmFamilyKind::kPoisson) return 0;
  return static_cast<int>((eta.array().abs() > kPoissonEtaLimit).count());
}

double GlmNegLogLikelihood(const MatrixXd& design, const VectorXd& response,
                           const VectorXd& theta, const GlmFamily& family) {
  const VectorXd eta = design * theta;
  const VectorXd a = family.DispersionDiagonal(static_cast<int>(design.rows()));
  double total = 0.0;
  for (int r = 0; r < eta.size(); ++r) {
    total += (family.B(eta[r]) - response[r] * eta[r]) / a[r];
  }
  return total;
}

VectorXd GlmScore(const MatrixXd& design, const VectorXd& response,
                  const VectorXd& theta, const GlmFamily& family) {
  const VectorXd eta = design * theta;
  const VectorXd a = family.DispersionDiagonal(static_cast<int>(design.rows()));
  const VectorXd residual =
      (response - family.BPrime(eta)).cwiseQuotient(a);
  return design.transpose() * residual;
}

MatrixXd GlmHessian(const MatrixXd& design, const VectorXd& theta,
                    const GlmFamily& family) {
  const VectorXd eta = design * theta;
  const VectorXd a = family.DispersionDiagonal(static_cast<int>(design.rows()));
  const VectorXd w = family.BDoublePrime(eta).cwiseQuotient(a);
  return design.transpose() * w.asDiagonal() * design;
}

absl::StatusOr<VectorXd> GlmInstanceMirGradient(const MatrixXd& features,
                                                const Bagging& bagging,
                                                const VectorXd& broadcast_labels,
                                                const VectorXd& theta,
                                                const GlmFamily& family) {
  if (absl::Status s = CheckBagging(features, bagging); !s.ok()) return s;
  if (absl::Status s = CheckTheta(features, theta); !s.ok()) return s;
  if (broadcast_labels.size() != features.rows()) {
    return absl::InvalidArgumentError("broadcast labels must have length n");
  }
  return GlmScore(features, broadcast_labels, theta, family);
}

absl::StatusOr<VectorXd> GlmAggMirGradient(const MatrixXd& features,
                                           const Bagging& bagging,
                                           const VectorXd& bag_labels,
                                           const VectorXd& theta,
                                           const GlmFamily& family) {
  if (absl::Status s = CheckBagging(features, bagging); !s.ok()) return s;
  if (absl::Status s = CheckTheta(features, theta); !s.ok()) return s;
  if (bag_labels.size() != bagging.num_bags()) {
    return absl::InvalidArgumentError("bag labels must have length m");
  }
  return GlmScore(BagMeans(bagging, features), bag_labels, theta, family);
}

absl::StatusOr<GlmFit> FitGlm(const MatrixXd& design, const VectorXd& response,
                              const GlmFamily& family,
                              const GlmFitOptions& options) {
  if (response.size() != design.rows()) {
    return absl::InvalidArgumentError("response length differs from rows");
  }
  if (absl::StatusOr<NormalEquationsSolver> rank =
          NormalEquationsSolver::Create(design);
      !rank.ok()) {
    return rank.status();
  }
  const double tolerance =
      options.gradient_tolerance * static_cast<double>(design.rows());
  VectorXd theta = VectorXd::Zero(design.cols());
  double objective = GlmNegLogLikelihood(design, response, theta, family);
  VectorXd score = GlmScore(design, response, theta, family);
  GlmFit fit;
  bool converged = score.norm() <= tolerance;
  // After convergence take one extra step when it still shrinks the score.
  bool polished = false;
  while (!polished) {
    if (converged) polished = true;
    if (fit.iterations >= options.max_iterations && !converged) break;
    const MatrixXd hessian = GlmHessian(design, theta, family);
    Eigen::LDLT<MatrixXd> ldlt(hessian);
    VectorXd step = ldlt.solve(score);
    if (ldlt.info() != Eigen::Success || !step.allFinite() ||
        score.dot(step) <= 0.0) {
      step = score;  // fall back to the score direction
    }
    double t = 1.0;
    VectorXd candidate = theta + step;
    double next = GlmNegLogLikelihood(design, response, candidate, family);
    const double slope = score.dot(step);
    int halvings = 0;
    while (!(next <= objective - 1e-4 * t * slope) && halvings < 60) {
      t *= 0.5;
      candidate = theta + t * step;
      next = GlmNegLogLikelihood(design, response, candidate, family);
      ++halvings;
    }
    const VectorXd next_score = GlmScore(design, response, candidate, family);
    const bool improves = next <= objective && next_score.allFinite() &&
                          (!converged || next_score.norm() < score.norm());
    if (!improves) {
      if (converged) break;
      if (halvings >= 60) break;  // stalled
    } else {
      theta = candidate;
      objective = next;
      score = next_score;
    }
    if (!converged) ++fit.iterations;
    converged = converged || score.norm() <= tolerance;
  }
  if (!converged) {
    return absl::DeadlineExceededError(absl::StrCat(
        "NonConvergence: score norm ", score.norm(), " after ", fit.iterations,
        " Newton iterations"));
  }
  fit.estimate.theta_hat = theta;
  fit.score_norm = score.norm();
  fit.clamped = family.ClampedCount(design * theta);
  return fit;
}

absl::StatusOr<GlmFit> FitGlmInstanceMir(const MatrixXd& features,
                                         const Bagging& bagging,
                                         const AggregateLabels& labels,
                                         const GlmFamily& family,
                                         const GlmFitOptions& options) {
  if (absl::Status s = CheckBagging(features, bagging); !s.ok()) return s;
  if (labels.values.size() != bagging.num_bags() ||
      labels.kind != AggregationKind::kMirSample) {
    return absl::InvalidArgumentError("expected one sampled label per bag");
  }
  absl::StatusOr<GlmFit> fit =
      FitGlm(features, Broadcast(bagging, labels.values), family, options);
  if (fit.ok()) fit->estimate.loss_kind = LossKind::kInstanceMir;
  return fit;
}

absl::StatusOr<GlmFit> FitGlmAggMir(const MatrixXd& features,
                                    const Bagging& bagging,
                                    const AggregateLabels& labels,
                                    const GlmFamily& family,
                                    const GlmFitOptions& options) {
  if (absl::Status s = CheckBagging(features, bagging); !s.ok()) return s;
  if (labels.values.size() != bagging.num_bags() ||
      labels.kind != AggregationKind::kMirSample) {
    return absl::InvalidArgumentError("expected one sampled label per bag");
  }
  absl::StatusOr<GlmFit> fit =
      FitGlm(BagMeans(bagging, features), labels.values, family, options);
  if (fit.ok()) fit->estimate.loss_kind = LossKind::kAggMir;
  return fit;
}

absl::StatusOr<double> GlmInstanceMirBound(const MatrixXd& features,
                                           const Bagging& bagging,
                                           const VectorXd& theta_star,
                                           const GlmFamily& family) {
  if (absl::Status s = CheckBagging(features, bagging); !s.ok()) return s;
  if (absl::Status s = CheckTheta(features, theta_star); !s.ok()) return s;
  const int n = static_cast<int>(features.rows());
  const VectorXd eta = features * theta_star;
  const VectorXd mu = family.BPrime(eta);
  const VectorXd a = family.DispersionDiagonal(n);
  const double variance_l1 = a.cwiseProduct(family.BDoublePrime(eta)).sum();
  const VectorXd smoothed = Broadcast(bagging, BagMeans(bagging, mu));
  const double m = bagging.num_bags();
  const double bracket = m * (mu.squaredNorm() + variance_l1) +
                         (smoothed - mu).squaredNorm() - smoothed.squaredNorm();
  const MatrixXd scaled = a.cwiseInverse().asDiagonal() * features;
  const double op = SpectralNorm(scaled);
  return op * op * bracket;
}

absl::StatusOr<double> GlmAggMirBound(const MatrixXd& features,
                                      const Bagging& bagging,
                                      const VectorXd& theta_star,
                                      const GlmFamily& family) {
  if (absl::Status s = CheckBagging(features, bagging); !s.ok()) return s;
  if (absl::Status s = CheckTheta(features, theta_star); !s.ok()) return s;
  const int n = static_cast<int>(features.rows());
  const VectorXd eta = features * theta_star;
  const VectorXd mu = family.BPrime(eta);
  const VectorXd a = family.DispersionDiagonal(n);
  const double variance_l1 = a.cwiseProduct(family.BDoublePrime(eta)).sum();
  const VectorXd bag_mu = BagMeans(bagging, mu);
  const VectorXd at_centroid =
      family.BPrime(VectorXd(BagMeans(bagging, features) * theta_star));
  const double m = bagging.num_bags();
  const double bracket = m * (mu.squaredNorm() + variance_l1) +
                         (bag_mu - at_centroid).squaredNorm() -
                         bag_mu.squaredNorm();
  const double inv_a = 1.0 / a.minCoeff();
  const double lambda_max =
      SymmetricEigenRange(MatrixXd(features.transpose() * features)).max;
  return inv_a * inv_a * lambda_max * bracket;
}

double JensenGap(const MatrixXd& features, const Bagging& bagging,
                 const VectorXd& theta, const GlmFamily& family) {
  const VectorXd bag_mu =
      BagMeans(bagging, VectorXd(family.BPrime(VectorXd(features * theta))));
  const VectorXd at_centroid =
      family.BPrime(VectorXd(BagMeans(bagging, features) * theta));
  return (bag_mu - at_centroid).squaredNorm();
}

double GlmRangeObjective(std::span<const double> values,
                         const Bagging& bagging) {
  double total = 0.0;
  for (int l = 0; l < bagging.num_bags(); ++l) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const int i : bagging.bag(l)) {
      lo = std::min(lo, values[static_cast<size_t>(i)]);
      hi = std::max(hi, values[static_cast<size_t>(i)]);
    }
    total += (hi - lo) * (hi - lo);
  }
  return total;
}

absl::StatusOr<Bagging> RangeMinimizingBagging(std::span<const double> values,
                                               int k) {
  return LabelKMeansEqual(values, k);
}

absl::StatusOr<StrongConvexityGapResult> StrongConvexityGap(
    const MatrixXd& features, const Bagging& bagging,
    const AggregateLabels& labels, GlmLoss loss, const VectorXd& theta_hat,
    const VectorXd& theta_star, const GlmFamily& family) {
  if (absl::Status s = CheckBagging(features, bagging); !s.ok()) return s;
  if (absl::Status s = CheckTheta(features, theta_hat); !s.ok()) return s;
  if (absl::Status s = CheckTheta(features, theta_star); !s.ok()) return s;
  if (labels.values.size() != bagging.num_bags()) {
    return absl::InvalidArgumentError("expected one label per bag");
  }
  const bool instance = loss == GlmLoss::kInstanceMir;
  const MatrixXd design =
      instance ? features : BagMeans(bagging, features);
  const VectorXd response =
      instance ? Broadcast(bagging, labels.values) : labels.values;
  constexpr int kPoints = 11;
  double mu_hat = std::numeric_limits<double>::infinity();
  double l_hat = 0.0;
  for (int p = 0; p < kPoints; ++p) {
    const double t = static_cast<double>(p) / (kPoints - 1);
    const VectorXd theta = theta_star + t * (theta_hat - theta_star);
    const EigenRange range = SymmetricEigenRange(GlmHessian(design, theta, family));
    mu_hat = std::min(mu_hat, range.min);
    l_hat = std::max(l_hat, range.max);
  }
  if (!(mu_hat > 1e-10)) {
    return absl::FailedPreconditionError(
        absl::StrCat("NonStronglyConvex: mu_hat=", mu_hat));
  }
  const double score_norm =
      GlmScore(design, response, theta_star, family).norm();
  StrongConvexityGapResult out;
  out.lhs = (theta_hat - theta_star).norm();
  out.rhs = score_norm / mu_hat;
  out.mu_hat = mu_hat;
  out.lipschitz_lower = score_norm / l_hat;
  return out;
}

VectorXd SampleGlmLabels(const VectorXd& eta, const GlmFamily& family,
                         Rng& rng) {
  const VectorXd a = family.DispersionDiagonal(static_cast<int>(eta.size()));
  VectorXd out(eta.size());
  for (int i = 0; i < eta.size(); ++i) {
    const double mean = family.BPrime(eta[i]);
    switch (family.kind()) {
      case GlmFamilyKind::kGaussian:
        out[i] = mean + std::sqrt(a[i]) * rng.Gaussian();
        break;
      case GlmFamilyKind::kLogistic:
        out[i] = rng.Uniform01() < mean ? 1.0 : 0.0;
        break;
      case GlmFamilyKind::kPoisson:
        out[i] = SamplePoisson(mean, rng);
        break;
    }
  }
  return out;
}

}  // namespace optbag
