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

#ifndef OPTBAG_HARNESS_H_
#define OPTBAG_HARNESS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "optbag/bagging.h"
#include "optbag/estimators.h"
#include "optbag/privacy.h"
#include "optbag/synth.h"

namespace optbag {

// One experiment table: every (k, method, loss, epsilon) combination is a
// cell, each repeated `runs` times.
struct ExperimentConfig {
  DataSpec data;
  std::vector<int> ks = {10};
  std::vector<LossKind> losses = {LossKind::kBagLlp};
  std::vector<BaggingMethod> methods = {BaggingMethod::kRandom};
  // Empty means non-private. Otherwise every cell runs the private pipeline
  // once per epsilon and `clip_bound` is required.
  std::vector<double> epsilons;
  double delta = 1e-5;
  std::optional<double> clip_bound;
  AggMirRoute agg_route = AggMirRoute::kLabelFree;
  int runs = 15;
  uint64_t master_seed = 0;
  bool emit_bounds = false;
  // Keep X, theta* and the label noise of run 0 for every run.
  bool fixed_data = false;
  // Label k-means uses bags of size >= k instead of exactly k.
  bool min_size = false;
  KMeansOptions kmeans;
};

// Checks runs >= 1, nonempty lists, k dividing n for equal-size methods and
// a clip bound for private runs.
absl::Status ValidateExperimentConfig(const ExperimentConfig& config);

// Builds a config from parsed "key = value" pairs. Keys: family, n, d, sigma,
// k, losses, methods, epsilons, delta, clip_bound, agg_route, runs, seed,
// emit_bounds, fixed_data, min_size, kmeans_iterations. Unknown keys are
// errors.
absl::StatusOr<ExperimentConfig> ExperimentConfigFromMap(
    const std::map<std::string, std::string>& values);

struct RunRecord {
  FeatureFamily family = FeatureFamily::kIsotropic;
  int n = 0;
  int d = 0;
  double sigma = 0.0;
  int k = 0;
  BaggingMethod method = BaggingMethod::kRandom;
  LossKind loss = LossKind::kBagLlp;
  std::optional<double> epsilon;  // empty when non-private
  int run = 0;
  uint64_t data_seed = 0;
  uint64_t seed = 0;  // bagging and label stream of this run
  double error = 0.0;
  std::optional<double> bound;
  std::string status = "ok";
};

// Seeds. The data seed depends only on (master, run) so that all cells of a
// run see the same data set; the run seed mixes in the method name, k, the
// epsilon index and the run index.
uint64_t DataSeed(uint64_t master_seed, int run);
uint64_t RunSeed(uint64_t master_seed, BaggingMethod method, int k,
                 int epsilon_index, int run);

// Runs every cell. Module errors mark the affected records with a status
// message and do not stop other cells. Records are ordered by k, method,
// loss, epsilon, run.
absl::StatusOr<std::vector<RunRecord>> RunExperiment(
    const ExperimentConfig& config);

// Fixed columns:
// family,n,d,sigma,k,method,loss,epsilon,run,data_seed,seed,error,bound,status
std::string FormatRunRecordsCsv(const std::vector<RunRecord>& records);

struct CellSummary {
  int k = 0;
  BaggingMethod method = BaggingMethod::kRandom;
  LossKind loss = LossKind::kBagLlp;
  std::optional<double> epsilon;
  int runs = 0;      // successful runs
  int failures = 0;  // runs with a non-ok status
  double mean = 0.0;
  double stddev = 0.0;
  double mean_bound = 0.0;  // nan without bounds
};

// Sample mean and standard deviation (n - 1 denominator, 0 for one value).
// "EmptyCell" (InvalidArgument) on an empty input.
absl::StatusOr<std::pair<double, double>> MeanAndStd(
    const std::vector<double>& values);

// Per-cell summaries in record order. Cells whose runs all failed report
// nan statistics.
std::vector<CellSummary> Summarize(const std::vector<RunRecord>& records);

// family,n,d,sigma,k,method,loss,epsilon,runs,failures,mean_error,std_error,mean_bound
std::string FormatSummaryCsv(const ExperimentConfig& config,
                             const std::vector<CellSummary>& cells);

}  // namespace optbag

#endif  // OPTBAG_HARNESS_H_
