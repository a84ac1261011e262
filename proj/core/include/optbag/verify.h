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

#ifndef OPTBAG_VERIFY_H_
#define OPTBAG_VERIFY_H_

#include <cstdint>
#include <string>
#include <vector>

namespace optbag {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Label k-means (equal and min-size) against exhaustive search over set
// partitions, n <= 8, k in {2, 3}, 200 instances per (n, k).
CheckResult CheckExactOptimum(uint64_t seed);

// Matrix and k-means identities on 100 random (data set, bagging) pairs:
// k-means equivalence, E||A X theta*||^2 = ||ytilde||^2, the smoothing
// quadratic form, S = M^T M, the per-direction decomposition and the
// centroid variance decomposition.
CheckResult CheckBaggingIdentities(uint64_t seed);

// E[kmeans(y) - kmeans(ytilde)] = (n - m) sigma^2 by Monte Carlo.
CheckResult CheckNoisyClusteringShift(uint64_t seed);

// Each linear-regression bound dominates its error on 100 instances.
CheckResult CheckBoundDomination(uint64_t seed);

// Super-bag delta: closed form vs direct loss difference, and nonnegativity.
CheckResult CheckSuperBagDelta(uint64_t seed);

// Matrix Chernoff eigenvalue floor vs random super-bag draws.
CheckResult CheckChernoffFloor(uint64_t seed);

// Noise calibration formulas and budget accounting of every pipeline.
CheckResult CheckPrivacyCalibration(uint64_t seed);

// GLM gradients, Gaussian reductions, gradient bounds, Jensen gap vs range
// objective, strong-convexity inequality.
CheckResult CheckGlm(uint64_t seed);

// All of the above, in order.
std::vector<CheckResult> RunVerifySuite(uint64_t seed);

}  // namespace optbag

#endif  // OPTBAG_VERIFY_H_
