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

#include "optbag/synth.h"

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace optbag {

std::string_view FeatureFamilyName(FeatureFamily family) {
  switch (family) {
    case FeatureFamily::kIsotropic:
      return "isotropic";
    case FeatureFamily::kNonIsotropicIndependent:
      return "noniso-independent";
    case FeatureFamily::kNonIsotropicCorrelated:
      return "noniso-correlated";
  }
  return "unknown";
}

absl::StatusOr<FeatureFamily> ParseFeatureFamily(std::string_view name) {
  for (const FeatureFamily family :
       {FeatureFamily::kIsotropic, FeatureFamily::kNonIsotropicIndependent,
        FeatureFamily::kNonIsotropicCorrelated}) {
    if (name == FeatureFamilyName(family)) return family;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown feature family '", std::string(name),
                   "' (isotropic, noniso-independent, noniso-correlated)"));
}

absl::Status ValidateDataSpec(const DataSpec& spec) {
  if (spec.d < 1) return absl::InvalidArgumentError("d must be >= 1");
  if (spec.n <= spec.d) {
    return absl::InvalidArgumentError(
        absl::StrCat("n must exceed d (n=", spec.n, ", d=", spec.d, ")"));
  }
  if (!(spec.sigma >= 0.0)) {
    return absl::InvalidArgumentError("sigma must be nonnegative");
  }
  return absl::OkStatus();
}

namespace {

MatrixXd StandardGaussianMatrix(int rows, int cols, Rng& rng) {
  MatrixXd out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) out(i, j) = rng.Gaussian();
  }
  return out;
}

}  // namespace

absl::StatusOr<FeatureSample> GenerateFeatures(const DataSpec& spec, Rng& rng) {
  if (absl::Status status = ValidateDataSpec(spec); !status.ok()) return status;
  FeatureSample sample;
  switch (spec.family) {
    case FeatureFamily::kIsotropic:
      sample.features = StandardGaussianMatrix(spec.n, spec.d, rng);
      sample.covariance = MatrixXd::Identity(spec.d, spec.d);
      break;
    case FeatureFamily::kNonIsotropicIndependent: {
      VectorXd eigenvalues(spec.d);
      for (int j = 0; j < spec.d; ++j) eigenvalues[j] = rng.Uniform(0.1, 10.0);
      sample.features = StandardGaussianMatrix(spec.n, spec.d, rng) *
                        eigenvalues.cwiseSqrt().asDiagonal();
      sample.covariance = eigenvalues.asDiagonal();
      break;
    }
    case FeatureFamily::kNonIsotropicCorrelated: {
      // Unconstrained Gaussian transform; rows z^T M have covariance M^T M.
      const MatrixXd transform = StandardGaussianMatrix(spec.d, spec.d, rng);
      sample.features = StandardGaussianMatrix(spec.n, spec.d, rng) * transform;
      sample.covariance = transform.transpose() * transform;
      break;
    }
  }
  return sample;
}

Dataset AttachLabels(MatrixXd features, double sigma, Rng& rng) {
  Dataset dataset;
  const int n = static_cast<int>(features.rows());
  const int d = static_cast<int>(features.cols());
  VectorXd theta_star(d);
  for (int j = 0; j < d; ++j) theta_star[j] = rng.Gaussian();
  VectorXd expected = features * theta_star;
  VectorXd labels(n);
  for (int i = 0; i < n; ++i) labels[i] = expected[i] + sigma * rng.Gaussian();
  dataset.features = std::move(features);
  dataset.labels = std::move(labels);
  dataset.expected_labels = std::move(expected);
  dataset.theta_star = std::move(theta_star);
  dataset.noise_sigma = sigma;
  return dataset;
}

absl::StatusOr<SyntheticData> GenerateSyntheticData(const DataSpec& spec) {
  Rng rng(spec.seed);
  absl::StatusOr<FeatureSample> sample = GenerateFeatures(spec, rng);
  if (!sample.ok()) return sample.status();
  SyntheticData out;
  out.dataset = AttachLabels(std::move(sample->features), spec.sigma, rng);
  out.covariance = std::move(sample->covariance);
  return out;
}

}  // namespace optbag
