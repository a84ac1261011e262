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

// Command-line front end: generate, bag, fit, bound, experiment, verify.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "optbag/bagging.h"
#include "optbag/bounds.h"
#include "optbag/estimators.h"
#include "optbag/harness.h"
#include "optbag/io.h"
#include "optbag/rng.h"
#include "optbag/synth.h"
#include "optbag/verify.h"

namespace optbag {
namespace {

// Writes to `path`, or stdout when it is empty or "-".
absl::Status Emit(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
    return absl::OkStatus();
  }
  return WriteFile(path, contents);
}

MatrixXd SampleCovariance(const MatrixXd& features) {
  const MatrixXd centered = features.rowwise() - features.colwise().mean();
  return centered.transpose() * centered /
         std::max<double>(1.0, static_cast<double>(features.rows() - 1));
}

MatrixXd Rows(const MatrixXd& matrix, const std::vector<int>& rows) {
  MatrixXd out(static_cast<int>(rows.size()), matrix.cols());
  for (size_t r = 0; r < rows.size(); ++r) {
    out.row(static_cast<int>(r)) = matrix.row(rows[r]);
  }
  return out;
}

VectorXd Entries(const VectorXd& vector, const std::vector<int>& rows) {
  VectorXd out(static_cast<int>(rows.size()));
  for (size_t r = 0; r < rows.size(); ++r) out[static_cast<int>(r)] = vector[rows[r]];
  return out;
}

struct GenerateArgs {
  std::string family = "isotropic";
  int n = 50000;
  int d = 32;
  double sigma = 0.5;
  uint64_t seed = 0;
  std::string out;
};

absl::Status RunGenerate(const GenerateArgs& args) {
  absl::StatusOr<FeatureFamily> family = ParseFeatureFamily(args.family);
  if (!family.ok()) return family.status();
  DataSpec spec;
  spec.family = *family;
  spec.n = args.n;
  spec.d = args.d;
  spec.sigma = args.sigma;
  spec.seed = args.seed;
  absl::StatusOr<SyntheticData> data = GenerateSyntheticData(spec);
  if (!data.ok()) return data.status();
  return Emit(args.out, FormatDatasetCsv(data->dataset));
}

struct BagArgs {
  std::string data;
  std::string method = "random";
  int k = 10;
  bool min_size = false;
  uint64_t seed = 0;
  std::string out;
};

absl::Status RunBag(const BagArgs& args) {
  absl::StatusOr<Dataset> dataset = ReadDatasetCsv(args.data);
  if (!dataset.ok()) return dataset.status();
  absl::StatusOr<BaggingMethod> method = ParseBaggingMethod(args.method);
  if (!method.ok()) return method.status();
  const MatrixXd covariance = SampleCovariance(dataset->features);
  BaggingRequest request;
  request.k = args.k;
  request.min_size = args.min_size;
  request.covariance = &covariance;
  Rng rng(args.seed);
  absl::StatusOr<SubsetBagging> bagging =
      BuildBagging(*method, dataset->features, dataset->labels, request, rng);
  if (!bagging.ok()) return bagging.status();
  return Emit(args.out, FormatBagging(*bagging, dataset->n()));
}

struct FitArgs {
  std::string data;
  std::string bagging;
  std::string loss = "bag-llp";
  uint64_t seed = 0;
  std::string out;
};

absl::Status RunFit(const FitArgs& args) {
  absl::StatusOr<Dataset> dataset = ReadDatasetCsv(args.data);
  if (!dataset.ok()) return dataset.status();
  absl::StatusOr<LossKind> loss = ParseLossKind(args.loss);
  if (!loss.ok()) return loss.status();
  absl::StatusOr<ModelEstimate> estimate;
  if (*loss == LossKind::kOls) {
    estimate = FitOls(dataset->features, dataset->labels);
  } else {
    if (args.bagging.empty()) {
      return absl::InvalidArgumentError("--bagging is required for this loss");
    }
    absl::StatusOr<SubsetBagging> bagging = ReadBagging(args.bagging, 1);
    if (!bagging.ok()) return bagging.status();
    Rng rng(args.seed);
    const AggregateLabels labels =
        MakeBagLabels(Entries(dataset->labels, bagging->instances),
                      bagging->bagging, AggregationFor(*loss), rng);
    estimate = FitLoss(*loss, Rows(dataset->features, bagging->instances),
                       bagging->bagging, labels);
  }
  if (!estimate.ok()) return estimate.status();
  std::string text = FormatEstimate(*estimate);
  if (dataset->theta_star) {
    absl::StrAppend(&text, "error ",
                    FormatDouble(*EstimationError(*estimate, *dataset->theta_star)),
                    "\n");
  }
  return Emit(args.out, text);
}

struct BoundArgs {
  std::string data;
  std::string bagging;
  std::optional<double> sigma;
  int draws = 500;
  uint64_t seed = 0;
  std::string out;
};

// Monte Carlo mean of ||theta_hat - theta*||^2 over fresh noise and, for MIR
// losses, fresh attribution draws.
absl::StatusOr<double> EmpiricalError(LossKind loss, const MatrixXd& features,
                                      const VectorXd& expected,
                                      const VectorXd& theta_star, double sigma,
                                      const Bagging& bagging, int draws, Rng& rng) {
  double total = 0.0;
  for (int draw = 0; draw < draws; ++draw) {
    VectorXd y = expected;
    for (int i = 0; i < y.size(); ++i) y[i] += sigma * rng.Gaussian();
    const AggregateLabels labels =
        MakeBagLabels(y, bagging, AggregationFor(loss), rng);
    absl::StatusOr<ModelEstimate> estimate = FitLoss(loss, features, bagging, labels);
    if (!estimate.ok()) return estimate.status();
    total += *EstimationError(*estimate, theta_star);
  }
  return total / draws;
}

absl::Status RunBound(const BoundArgs& args) {
  absl::StatusOr<Dataset> dataset = ReadDatasetCsv(args.data);
  if (!dataset.ok()) return dataset.status();
  if (!dataset->expected_labels || !dataset->theta_star) {
    return absl::FailedPreconditionError(
        "bound needs the noiseless label column of a synthetic data set");
  }
  absl::StatusOr<SubsetBagging> subset = ReadBagging(args.bagging, 1);
  if (!subset.ok()) return subset.status();
  const double sigma = args.sigma.value_or(dataset->noise_sigma);
  const MatrixXd features = Rows(dataset->features, subset->instances);
  const VectorXd expected = Entries(*dataset->expected_labels, subset->instances);
  const Bagging& bagging = subset->bagging;
  Rng rng(args.seed);

  std::vector<BoundReportRow> rows;
  auto add = [&](std::string name, absl::StatusOr<double> bound,
                 absl::StatusOr<double> empirical) -> absl::Status {
    if (!bound.ok()) return bound.status();
    if (!empirical.ok()) return empirical.status();
    rows.push_back({std::move(name), *bound, *empirical, *bound / *empirical});
    return absl::OkStatus();
  };
  if (absl::Status s = add("instance-mir", InstanceMirBound(features, expected, sigma, bagging),
                           EmpiricalError(LossKind::kInstanceMir, features, expected,
                                          *dataset->theta_star, sigma, bagging,
                                          args.draws, rng));
      !s.ok()) {
    return s;
  }
  if (absl::Status s = add("bag-llp", BagLlpBound(features, sigma, bagging),
                           BagLlpExpectedError(features, sigma, bagging));
      !s.ok()) {
    return s;
  }
  if (absl::Status s = add("agg-mir", AggMirBound(features, expected, sigma, bagging),
                           EmpiricalError(LossKind::kAggMir, features, expected,
                                          *dataset->theta_star, sigma, bagging,
                                          args.draws, rng));
      !s.ok()) {
    return s;
  }
  return Emit(args.out, FormatBoundReport(rows));
}

struct ExperimentArgs {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<int> runs;
  std::string out;
  std::string summary;
  bool fixed_data = false;
  bool min_size = false;
  std::vector<double> epsilon_grid;
  std::optional<double> clip_bound;
};

absl::Status RunExperimentCommand(const ExperimentArgs& args) {
  absl::StatusOr<std::string> text = ReadFile(args.config);
  if (!text.ok()) return text.status();
  absl::StatusOr<std::map<std::string, std::string>> values = ParseConfig(*text);
  if (!values.ok()) return values.status();
  absl::StatusOr<ExperimentConfig> config = ExperimentConfigFromMap(*values);
  if (!config.ok()) return config.status();
  // Flags override the file.
  if (args.seed) config->master_seed = *args.seed;
  if (args.runs) config->runs = *args.runs;
  if (args.fixed_data) config->fixed_data = true;
  if (args.min_size) config->min_size = true;
  if (!args.epsilon_grid.empty()) config->epsilons = args.epsilon_grid;
  if (args.clip_bound) config->clip_bound = *args.clip_bound;

  absl::StatusOr<std::vector<RunRecord>> records = RunExperiment(*config);
  if (!records.ok()) return records.status();
  if (absl::Status s = Emit(args.out, FormatRunRecordsCsv(*records)); !s.ok()) {
    return s;
  }
  if (!args.summary.empty()) {
    return Emit(args.summary, FormatSummaryCsv(*config, Summarize(*records)));
  }
  return absl::OkStatus();
}

int RunVerify(uint64_t seed) {
  bool all_passed = true;
  for (const CheckResult& check : RunVerifySuite(seed)) {
    std::cout << absl::StrFormat("%s  %s: %s (%.1fs)\n",
                                 check.passed ? "PASS" : "FAIL", check.name,
                                 check.detail, check.seconds);
    all_passed = all_passed && check.passed;
  }
  return all_passed ? 0 : 1;
}

int Report(const absl::Status& status) {
  if (status.ok()) return 0;
  std::cerr << "optbag: " << status.ToString() << "\n";
  return 1;
}

}  // namespace
}  // namespace optbag

int main(int argc, char** argv) {
  using namespace optbag;
  CLI::App app{"Bag construction and aggregate-label regression toolkit"};
  app.require_subcommand(1);

  GenerateArgs generate;
  CLI::App* generate_cmd = app.add_subcommand("generate", "Write a synthetic data set");
  generate_cmd->add_option("--family", generate.family,
                           "isotropic, noniso-independent or noniso-correlated");
  generate_cmd->add_option("--n", generate.n, "Instances");
  generate_cmd->add_option("--d", generate.d, "Features");
  generate_cmd->add_option("--sigma", generate.sigma, "Label noise std");
  generate_cmd->add_option("--seed", generate.seed, "Random seed");
  generate_cmd->add_option("--out", generate.out, "Output path (default stdout)");

  BagArgs bag;
  CLI::App* bag_cmd = app.add_subcommand("bag", "Partition a data set into bags");
  bag_cmd->add_option("--data", bag.data, "Data set file")->required();
  bag_cmd->add_option("--method", bag.method,
                      "instance-kmeans, scaled-instance-kmeans, label-kmeans, "
                      "random, superbag-random or superbag-sorted");
  bag_cmd->add_option("--k", bag.k, "Bag size");
  bag_cmd->add_flag("--min-size", bag.min_size,
                    "Label k-means with bags of size >= k");
  bag_cmd->add_option("--seed", bag.seed, "Random seed");
  bag_cmd->add_option("--out", bag.out, "Output path (default stdout)");

  FitArgs fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit a model from bag labels");
  fit_cmd->add_option("--data", fit.data, "Data set file")->required();
  fit_cmd->add_option("--bagging", fit.bagging, "Bagging file");
  fit_cmd->add_option("--loss", fit.loss, "instance-mir, bag-llp, agg-mir or ols");
  fit_cmd->add_option("--seed", fit.seed, "Seed for the bag-label draw");
  fit_cmd->add_option("--out", fit.out, "Output path (default stdout)");

  BoundArgs bound;
  CLI::App* bound_cmd =
      app.add_subcommand("bound", "Compare error bounds with observed errors");
  bound_cmd->add_option("--data", bound.data, "Data set file")->required();
  bound_cmd->add_option("--bagging", bound.bagging, "Bagging file")->required();
  bound_cmd->add_option("--sigma", bound.sigma,
                        "Noise std (default: estimated from the data set)");
  bound_cmd->add_option("--draws", bound.draws, "Monte Carlo draws");
  bound_cmd->add_option("--seed", bound.seed, "Random seed");
  bound_cmd->add_option("--out", bound.out, "Output path (default stdout)");

  ExperimentArgs experiment;
  CLI::App* experiment_cmd =
      app.add_subcommand("experiment", "Run a replicated experiment grid");
  experiment_cmd->add_option("config", experiment.config, "Config file")->required();
  experiment_cmd->add_option("--seed", experiment.seed, "Master seed");
  experiment_cmd->add_option("--runs", experiment.runs, "Runs per cell");
  experiment_cmd->add_option("--out", experiment.out,
                             "Per-run CSV path (default stdout)");
  experiment_cmd->add_option("--summary", experiment.summary,
                             "Per-cell summary CSV path");
  experiment_cmd->add_flag("--fixed-data", experiment.fixed_data,
                           "Reuse the run-0 data set in every run");
  experiment_cmd->add_flag("--min-size", experiment.min_size,
                           "Label k-means with bags of size >= k");
  experiment_cmd
      ->add_option("--epsilon-grid", experiment.epsilon_grid,
                   "Comma-separated privacy budgets")
      ->delimiter(',');
  experiment_cmd->add_option("--clip-bound", experiment.clip_bound,
                             "Label clip bound R");

  uint64_t verify_seed = 0;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Run the identity and bound checks");
  verify_cmd->add_option("--seed", verify_seed, "Random seed");

  CLI11_PARSE(app, argc, argv);

  if (*generate_cmd) return Report(RunGenerate(generate));
  if (*bag_cmd) return Report(RunBag(bag));
  if (*fit_cmd) return Report(RunFit(fit));
  if (*bound_cmd) return Report(RunBound(bound));
  if (*experiment_cmd) return Report(RunExperimentCommand(experiment));
  if (*verify_cmd) return RunVerify(verify_seed);
  return 1;
}
