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

#ifndef OPTBAG_SYNTH_H_
#define OPTBAG_SYNTH_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "optbag/data_model.h"
#include "optbag/rng.h"

namespace optbag {

enum class FeatureFamily {
  kIsotropic,               // rows ~ N(0, I)
  kNonIsotropicIndependent,  // diagonal covariance, eigenvalues ~ U(0.1, 10)
  kNonIsotropicCorrelated,   // rows z^T M, z ~ N(0, I), M entries ~ N(0, 1)
};

std::string_view FeatureFamilyName(FeatureFamily family);
absl::StatusOr<FeatureFamily> ParseFeatureFamily(std::string_view name);

struct DataSpec {
  int n = 50000;
  int d = 32;
  FeatureFamily family = FeatureFamily::kIsotropic;
  double sigma = 0.5;
  uint64_t seed = 0;
};

// Requires n > d >= 1 and sigma >= 0.
absl::Status ValidateDataSpec(const DataSpec& spec);

struct FeatureSample {
  MatrixXd features;    // n x d
  MatrixXd covariance;  // generating covariance
};

// Draws the feature matrix for `spec.family` from `rng` (spec.seed is not
// consulted here). Entries are drawn row by row.
absl::StatusOr<FeatureSample> GenerateFeatures(const DataSpec& spec, Rng& rng);

// Draws theta* ~ N(0, I_d) and labels y = X theta* + N(0, sigma^2) noise.
Dataset AttachLabels(MatrixXd features, double sigma, Rng& rng);

struct SyntheticData {
  Dataset dataset;
  MatrixXd covariance;
};

// GenerateFeatures + AttachLabels from an Rng seeded with spec.seed.
absl::StatusOr<SyntheticData> GenerateSyntheticData(const DataSpec& spec);

}  // namespace optbag

#endif  // OPTBAG_SYNTH_H_
