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

#include "optbag/privacy.h"

#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace optbag {
namespace {

// Tolerance on budget totals for rounding in halved budgets.
constexpr double kBudgetSlack = 1e-12;

}  // namespace

absl::Status ValidatePrivacyParams(const PrivacyParams& params) {
  if (!(params.epsilon > 0.0) || !std::isfinite(params.epsilon)) {
    return absl::InvalidArgumentError("epsilon must be positive and finite");
  }
  if (!(params.delta > 0.0 && params.delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1)");
  }
  if (!(params.clip_bound > 0.0) || !std::isfinite(params.clip_bound)) {
    return absl::InvalidArgumentError("clip bound must be positive and finite");
  }
  return absl::OkStatus();
}

VectorXd ClipLabels(const VectorXd& labels, double clip_bound) {
  return labels.cwiseMax(-clip_bound).cwiseMin(clip_bound);
}

double GaussianAlphaSquared(double epsilon, double delta, double clip_bound) {
  return 4.0 * clip_bound * clip_bound * std::log(1.25 / delta) /
         (epsilon * epsilon);
}

absl::StatusOr<NoiseScale> NoiseScaleInstanceMir(const PrivacyParams& params,
                                                 int k) {
  if (absl::Status s = ValidatePrivacyParams(params); !s.ok()) return s;
  if (k < 1) return absl::InvalidArgumentError("k must be positive");
  const double r = params.clip_bound;
  const double alpha2 = 16.0 * r * r * std::log(2.5 / params.delta) /
                        (params.epsilon * params.epsilon);
  const double alpha = std::sqrt(alpha2);
  return NoiseScale{alpha, alpha / k};
}

absl::StatusOr<NoiseScale> NoiseScaleBagLlp(const PrivacyParams& params, int k) {
  if (absl::Status s = ValidatePrivacyParams(params); !s.ok()) return s;
  if (k < 1) return absl::InvalidArgumentError("k must be positive");
  const double alpha = std::sqrt(
      GaussianAlphaSquared(params.epsilon, params.delta, params.clip_bound));
  return NoiseScale{alpha, alpha / k};
}

absl::StatusOr<AggregateLabels> PrivatizeBagLabels(const AggregateLabels& labels,
                                                   double bag_label_std,
                                                   Rng& rng) {
  if (labels.privatized) {
    return absl::FailedPreconditionError("AlreadyPrivatized");
  }
  if (!(bag_label_std >= 0.0)) {
    return absl::InvalidArgumentError("noise std must be nonnegative");
  }
  AggregateLabels out = labels;
  for (int l = 0; l < out.values.size(); ++l) {
    out.values[l] += bag_label_std * rng.Gaussian();
  }
  out.privatized = true;
  out.noise_std = bag_label_std;
  return out;
}

absl::StatusOr<Bagging> PrivateLabelKMeans(std::span<const double> labels,
                                           int k, double alpha, Rng& rng,
                                           bool min_size) {
  if (!(alpha >= 0.0)) return absl::InvalidArgumentError("alpha must be >= 0");
  std::vector<double> noisy(labels.begin(), labels.end());
  for (double& v : noisy) v += alpha * rng.Gaussian();
  return min_size ? LabelKMeansMinSize(noisy, k) : LabelKMeansEqual(noisy, k);
}

absl::Status PrivacyLedger::Spend(std::string mechanism, double epsilon,
                                  double delta, double noise_std) {
  const double next_epsilon = spent_epsilon_ + epsilon;
  const double next_delta = spent_delta_ + delta;
  if (next_epsilon > budget_epsilon_ * (1.0 + kBudgetSlack) ||
      next_delta > budget_delta_ * (1.0 + kBudgetSlack)) {
    return absl::ResourceExhaustedError(absl::StrFormat(
        "BudgetExceeded: %s would spend (%g, %g) of (%g, %g)", mechanism,
        next_epsilon, next_delta, budget_epsilon_, budget_delta_));
  }
  spent_epsilon_ = next_epsilon;
  spent_delta_ = next_delta;
  entries_.push_back({std::move(mechanism), epsilon, delta, noise_std});
  return absl::OkStatus();
}

std::string PrivacyLedger::Manifest() const {
  std::string out;
  for (const Entry& e : entries_) {
    absl::StrAppendFormat(&out, "mechanism=%s epsilon=%.17g delta=%.17g noise_std=%.17g\n",
                          e.mechanism, e.epsilon, e.delta, e.noise_std);
  }
  absl::StrAppendFormat(&out,
                        "total epsilon=%.17g delta=%.17g budget_epsilon=%.17g "
                        "budget_delta=%.17g\n",
                        spent_epsilon_, spent_delta_, budget_epsilon_,
                        budget_delta_);
  return out;
}

BaggingMethod DefaultPrivateMethod(LossKind loss, AggMirRoute route) {
  switch (loss) {
    case LossKind::kInstanceMir:
      return BaggingMethod::kLabelKMeans;
    case LossKind::kAggMir:
      return route == AggMirRoute::kClustering ? BaggingMethod::kLabelKMeans
                                               : BaggingMethod::kInstanceKMeans;
    case LossKind::kBagLlp:
    case LossKind::kOls:
      return BaggingMethod::kInstanceKMeans;
  }
  return BaggingMethod::kInstanceKMeans;
}

absl::StatusOr<PrivateRelease> PrivatePipeline(const Dataset& dataset, int k,
                                               LossKind loss,
                                               const PrivacyParams& params,
                                               Rng& rng,
                                               const PipelineOptions& options) {
  if (absl::Status s = ValidatePrivacyParams(params); !s.ok()) return s;
  if (loss == LossKind::kOls) {
    return absl::InvalidArgumentError("no private pipeline for ols");
  }
  if (k < 1) return absl::InvalidArgumentError("k must be positive");
  for (int i = 0; i < dataset.labels.size(); ++i) {
    if (std::abs(dataset.labels[i]) > params.clip_bound) {
      return absl::InvalidArgumentError(absl::StrCat(
          "UnclippedLabels: |y_", i, "| = ", std::abs(dataset.labels[i]),
          " > R = ", params.clip_bound));
    }
  }
  const BaggingMethod method =
      options.method.value_or(DefaultPrivateMethod(loss, options.agg_route));
  const bool reads_labels = IsLabelDependent(method);
  // A label-dependent bagging is a second query on the labels.
  const double label_epsilon = reads_labels ? params.epsilon / 2 : params.epsilon;
  const double label_delta = reads_labels ? params.delta / 2 : params.delta;
  const double alpha =
      std::sqrt(GaussianAlphaSquared(label_epsilon, label_delta, params.clip_bound));

  PrivacyLedger ledger(params.epsilon, params.delta);
  BaggingRequest request;
  request.k = k;
  request.min_size = options.min_size;
  request.covariance = options.covariance;
  request.kmeans = options.kmeans;

  VectorXd bagging_labels = dataset.labels;
  if (reads_labels) {
    for (int i = 0; i < bagging_labels.size(); ++i) {
      bagging_labels[i] += alpha * rng.Gaussian();
    }
    if (absl::Status s = ledger.Spend("noisy-label-clustering", label_epsilon,
                                      label_delta, alpha);
        !s.ok()) {
      return s;
    }
  }
  absl::StatusOr<SubsetBagging> bagging =
      BuildBagging(method, dataset.features, bagging_labels, request, rng);
  if (!bagging.ok()) return bagging.status();

  VectorXd bag_member_labels(static_cast<int>(bagging->instances.size()));
  for (size_t p = 0; p < bagging->instances.size(); ++p) {
    bag_member_labels[static_cast<int>(p)] =
        dataset.labels[bagging->instances[p]];
  }
  const AggregateLabels clean = MakeBagLabels(
      bag_member_labels, bagging->bagging, AggregationFor(loss), rng);
  const double bag_std = alpha / k;
  absl::StatusOr<AggregateLabels> noisy =
      PrivatizeBagLabels(clean, bag_std, rng);
  if (!noisy.ok()) return noisy.status();
  if (absl::Status s =
          ledger.Spend("bag-label-gaussian", label_epsilon, label_delta, bag_std);
      !s.ok()) {
    return s;
  }
  return PrivateRelease{*std::move(bagging), *std::move(noisy), std::move(ledger)};
}

}  // namespace optbag
