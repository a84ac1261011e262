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

#ifndef OPTBAG_PRIVACY_H_
#define OPTBAG_PRIVACY_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "optbag/bagging.h"
#include "optbag/data_model.h"
#include "optbag/estimators.h"
#include "optbag/rng.h"

namespace optbag {

// Label-DP budget and the clip bound R applied to every label.
struct PrivacyParams {
  double epsilon = 1.0;
  double delta = 1e-5;
  double clip_bound = 1.0;
};

// epsilon > 0, 0 < delta < 1, clip_bound > 0.
absl::Status ValidatePrivacyParams(const PrivacyParams& params);

// Projects each label onto [-R, R].
VectorXd ClipLabels(const VectorXd& labels, double clip_bound);

// Gaussian mechanism variance for labels bounded by R:
// alpha^2 = 4 R^2 ln(1.25 / delta) / epsilon^2.
double GaussianAlphaSquared(double epsilon, double delta, double clip_bound);

struct NoiseScale {
  double alpha = 0.0;
  // Noise std on a released bag label: alpha / k, the subsampling
  // amplification of releasing one of k labels.
  double bag_label_std = 0.0;
};

// Instance-MIR: each of the two queries runs at (epsilon/2, delta/2), so
// alpha^2 = 16 R^2 ln(2.5 / delta) / epsilon^2.
absl::StatusOr<NoiseScale> NoiseScaleInstanceMir(const PrivacyParams& params,
                                                 int k);

// Bag-LLP: the bagging is label-free and the whole budget goes to the bag
// labels, alpha^2 = 4 R^2 ln(1.25 / delta) / epsilon^2.
absl::StatusOr<NoiseScale> NoiseScaleBagLlp(const PrivacyParams& params, int k);

// Adds N(0, std^2) to every bag label. "AlreadyPrivatized" when the labels
// already carry noise.
absl::StatusOr<AggregateLabels> PrivatizeBagLabels(const AggregateLabels& labels,
                                                   double bag_label_std, Rng& rng);

// Equal-size label k-means (or the min-size variant) on y + N(0, alpha^2)
// noise. The bagging depends on the labels only through the noisy copy.
absl::StatusOr<Bagging> PrivateLabelKMeans(std::span<const double> labels,
                                           int k, double alpha, Rng& rng,
                                           bool min_size = false);

// Basic-composition accountant for one pipeline invocation.
class PrivacyLedger {
 public:
  struct Entry {
    std::string mechanism;
    double epsilon = 0.0;
    double delta = 0.0;
    double noise_std = 0.0;
  };

  PrivacyLedger(double epsilon, double delta)
      : budget_epsilon_(epsilon), budget_delta_(delta) {}

  // Records a mechanism. "BudgetExceeded" (ResourceExhausted) when the
  // totals would pass the declared budget.
  absl::Status Spend(std::string mechanism, double epsilon, double delta,
                     double noise_std);

  double budget_epsilon() const { return budget_epsilon_; }
  double budget_delta() const { return budget_delta_; }
  double spent_epsilon() const { return spent_epsilon_; }
  double spent_delta() const { return spent_delta_; }
  const std::vector<Entry>& entries() const { return entries_; }

  // One line per mechanism plus a totals line.
  std::string Manifest() const;

 private:
  double budget_epsilon_;
  double budget_delta_;
  double spent_epsilon_ = 0.0;
  double spent_delta_ = 0.0;
  std::vector<Entry> entries_;
};

// How the aggregate-MIR pipeline forms bags.
enum class AggMirRoute {
  kLabelFree,   // label-free bagging, whole budget on the bag labels
  kClustering,  // private label k-means, budget split as for instance-MIR
};

struct PipelineOptions {
  AggMirRoute agg_route = AggMirRoute::kLabelFree;
  // Replaces the loss's default bagging. Label-dependent methods run on a
  // noisy copy of the labels and take half the budget.
  std::optional<BaggingMethod> method;
  bool min_size = false;
  const MatrixXd* covariance = nullptr;
  KMeansOptions kmeans;
};

struct PrivateRelease {
  SubsetBagging bagging;
  AggregateLabels labels;  // over bagging.bagging
  PrivacyLedger ledger;
};

// Default bagging per loss: instance-MIR uses private label k-means, bag-LLP
// balanced instance k-means, agg-MIR follows `agg_route`.
// "UnclippedLabels" (InvalidArgument) when some |y_i| > R.
absl::StatusOr<PrivateRelease> PrivatePipeline(const Dataset& dataset, int k,
                                               LossKind loss,
                                               const PrivacyParams& params,
                                               Rng& rng,
                                               const PipelineOptions& options = {});

// The bagging the pipeline uses for `loss` when none is forced.
BaggingMethod DefaultPrivateMethod(LossKind loss, AggMirRoute route);

}  // namespace optbag

#endif  // OPTBAG_PRIVACY_H_
