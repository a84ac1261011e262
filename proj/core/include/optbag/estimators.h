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

#ifndef OPTBAG_ESTIMATORS_H_
#define OPTBAG_ESTIMATORS_H_

#include <string_view>

#include "absl/status/statusor.h"
#include "optbag/data_model.h"
#include "optbag/rng.h"

namespace optbag {

enum class LossKind {
  kInstanceMir,  // per-instance squared loss against the bag's released label
  kBagLlp,       // bag label vs mean prediction; labels are bag means
  kAggMir,       // bag label vs prediction at the bag centroid
  kOls,          // ordinary least squares on individual labels
};

std::string_view LossKindName(LossKind kind);
absl::StatusOr<LossKind> ParseLossKind(std::string_view name);

// Bag-label aggregation consumed by `kind`. kOls maps to kLlpMean, which is
// the identity on unit bags.
AggregationKind AggregationFor(LossKind kind);

struct ModelEstimate {
  VectorXd theta_hat;
  LossKind loss_kind = LossKind::kOls;
};

// kMirSample: the label of one uniformly drawn member per bag.
// kLlpMean: the bag mean.
AggregateLabels MakeBagLabels(const VectorXd& labels, const Bagging& bagging,
                              AggregationKind kind, Rng& rng);

// MIR labels for a given attribution draw.
AggregateLabels MirBagLabels(const VectorXd& labels, const Bagging& bagging,
                             const AttributionDraw& draw);

// theta = (X^T X)^{-1} X^T (A y), with X^T (A y) accumulated per bag as
// sum_l ybar_l sum_{i in B_l} x_i.
absl::StatusOr<ModelEstimate> FitInstanceMir(const MatrixXd& features,
                                             const Bagging& bagging,
                                             const AggregateLabels& labels);

// Least squares of the bag labels on the bag centroids S X. The two losses
// share the closed form and differ only in how the bag labels were formed.
absl::StatusOr<ModelEstimate> FitBagLlp(const MatrixXd& features,
                                        const Bagging& bagging,
                                        const AggregateLabels& labels);
absl::StatusOr<ModelEstimate> FitAggMir(const MatrixXd& features,
                                        const Bagging& bagging,
                                        const AggregateLabels& labels);

absl::StatusOr<ModelEstimate> FitOls(const MatrixXd& features,
                                     const VectorXd& labels);

// Dispatches on `kind`. kOls ignores the bagging and fits `labels.values`
// directly, so it expects unit bags.
absl::StatusOr<ModelEstimate> FitLoss(LossKind kind, const MatrixXd& features,
                                      const Bagging& bagging,
                                      const AggregateLabels& labels);

// ||theta_hat - theta_star||^2.
absl::StatusOr<double> EstimationError(const ModelEstimate& estimate,
                                       const VectorXd& theta_star);

}  // namespace optbag

#endif  // OPTBAG_ESTIMATORS_H_
