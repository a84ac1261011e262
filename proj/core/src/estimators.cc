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

#include "optbag/estimators.h"

#include <string>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "optbag/linalg.h"

namespace optbag {
namespace {

absl::Status CheckShapes(const MatrixXd& features, const Bagging& bagging,
                         const AggregateLabels& labels) {
  if (features.rows() != bagging.num_instances()) {
    return absl::InvalidArgumentError(
        absl::StrCat("features have ", features.rows(), " rows, bagging covers ",
                     bagging.num_instances(), " instances"));
  }
  if (labels.values.size() != bagging.num_bags()) {
    return absl::InvalidArgumentError(
        absl::StrCat("got ", labels.values.size(), " bag labels for ",
                     bagging.num_bags(), " bags"));
  }
  return absl::OkStatus();
}

absl::Status CheckKind(const AggregateLabels& labels, AggregationKind want,
                       LossKind loss) {
  if (labels.kind != want) {
    return absl::InvalidArgumentError(absl::StrCat(
        std::string(LossKindName(loss)), " expects ",
        want == AggregationKind::kMirSample ? "sampled" : "mean", " bag labels"));
  }
  return absl::OkStatus();
}

absl::StatusOr<ModelEstimate> FitCentroids(const MatrixXd& features,
                                           const Bagging& bagging,
                                           const AggregateLabels& labels,
                                           LossKind loss) {
  absl::StatusOr<NormalEquationsSolver> solver =
      NormalEquationsSolver::Create(BagMeans(bagging, features));
  if (!solver.ok()) return solver.status();
  return ModelEstimate{solver->SolveLeastSquares(labels.values), loss};
}

}  // namespace

std::string_view LossKindName(LossKind kind) {
  switch (kind) {
    case LossKind::kInstanceMir:
      return "instance-mir";
    case LossKind::kBagLlp:
      return "bag-llp";
    case LossKind::kAggMir:
      return "agg-mir";
    case LossKind::kOls:
      return "ols";
  }
  return "unknown";
}

absl::StatusOr<LossKind> ParseLossKind(std::string_view name) {
  for (const LossKind kind : {LossKind::kInstanceMir, LossKind::kBagLlp,
                              LossKind::kAggMir, LossKind::kOls}) {
    if (name == LossKindName(kind)) return kind;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown loss '", std::string(name), "' (instance-mir, bag-llp, agg-mir, ols)"));
}

AggregationKind AggregationFor(LossKind kind) {
  return (kind == LossKind::kInstanceMir || kind == LossKind::kAggMir)
             ? AggregationKind::kMirSample
             : AggregationKind::kLlpMean;
}

AggregateLabels MirBagLabels(const VectorXd& labels, const Bagging& bagging,
                             const AttributionDraw& draw) {
  AggregateLabels out;
  out.kind = AggregationKind::kMirSample;
  out.values.resize(bagging.num_bags());
  for (int l = 0; l < bagging.num_bags(); ++l) {
    out.values[l] = labels[draw.chosen[static_cast<size_t>(l)]];
  }
  return out;
}

AggregateLabels MakeBagLabels(const VectorXd& labels, const Bagging& bagging,
                              AggregationKind kind, Rng& rng) {
  if (kind == AggregationKind::kMirSample) {
    return MirBagLabels(labels, bagging, SampleAttribution(bagging, rng));
  }
  AggregateLabels out;
  out.kind = AggregationKind::kLlpMean;
  out.values = BagMeans(bagging, labels);
  return out;
}

absl::StatusOr<ModelEstimate> FitInstanceMir(const MatrixXd& features,
                                             const Bagging& bagging,
                                             const AggregateLabels& labels) {
  if (absl::Status s = CheckShapes(features, bagging, labels); !s.ok()) return s;
  if (absl::Status s = CheckKind(labels, AggregationKind::kMirSample,
                                 LossKind::kInstanceMir);
      !s.ok()) {
    return s;
  }
  absl::StatusOr<NormalEquationsSolver> solver =
      NormalEquationsSolver::Create(features);
  if (!solver.ok()) return solver.status();
  VectorXd rhs = VectorXd::Zero(features.cols());
  for (int l = 0; l < bagging.num_bags(); ++l) {
    VectorXd bag_sum = VectorXd::Zero(features.cols());
    for (const int i : bagging.bag(l)) bag_sum += features.row(i).transpose();
    rhs += labels.values[l] * bag_sum;
  }
  return ModelEstimate{solver->SolveNormal(rhs), LossKind::kInstanceMir};
}

absl::StatusOr<ModelEstimate> FitBagLlp(const MatrixXd& features,
                                        const Bagging& bagging,
                                        const AggregateLabels& labels) {
  if (absl::Status s = CheckShapes(features, bagging, labels); !s.ok()) return s;
  if (absl::Status s =
          CheckKind(labels, AggregationKind::kLlpMean, LossKind::kBagLlp);
      !s.ok()) {
    return s;
  }
  return FitCentroids(features, bagging, labels, LossKind::kBagLlp);
}

absl::StatusOr<ModelEstimate> FitAggMir(const MatrixXd& features,
                                        const Bagging& bagging,
                                        const AggregateLabels& labels) {
  if (absl::Status s = CheckShapes(features, bagging, labels); !s.ok()) return s;
  if (absl::Status s =
          CheckKind(labels, AggregationKind::kMirSample, LossKind::kAggMir);
      !s.ok()) {
    return s;
  }
  return FitCentroids(features, bagging, labels, LossKind::kAggMir);
}

absl::StatusOr<ModelEstimate> FitOls(const MatrixXd& features,
                                     const VectorXd& labels) {
  if (labels.size() != features.rows()) {
    return absl::InvalidArgumentError("labels length differs from rows");
  }
  absl::StatusOr<NormalEquationsSolver> solver =
      NormalEquationsSolver::Create(features);
  if (!solver.ok()) return solver.status();
  return ModelEstimate{solver->SolveLeastSquares(labels), LossKind::kOls};
}

absl::StatusOr<ModelEstimate> FitLoss(LossKind kind, const MatrixXd& features,
                                      const Bagging& bagging,
                                      const AggregateLabels& labels) {
  switch (kind) {
    case LossKind::kInstanceMir:
      return FitInstanceMir(features, bagging, labels);
    case LossKind::kBagLlp:
      return FitBagLlp(features, bagging, labels);
    case LossKind::kAggMir:
      return FitAggMir(features, bagging, labels);
    case LossKind::kOls:
      return FitOls(features, labels.values);
  }
  return absl::InvalidArgumentError("unknown loss");
}

absl::StatusOr<double> EstimationError(const ModelEstimate& estimate,
                                       const VectorXd& theta_star) {
  if (estimate.theta_hat.size() != theta_star.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("dimension mismatch: ", estimate.theta_hat.size(), " vs ",
                     theta_star.size()));
  }
  return (estimate.theta_hat - theta_star).squaredNorm();
}

}  // namespace optbag
