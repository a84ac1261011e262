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

#include "optbag/harness.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "optbag/bounds.h"
#include "optbag/io.h"
#include "optbag/rng.h"

namespace optbag {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Sub-stream tags under a run seed.
constexpr uint64_t kBaggingStream = 1;
constexpr uint64_t kLabelStream = 100;
constexpr uint64_t kPrivateStream = 200;
constexpr uint64_t kDataTag = 0x6461746173656564;  // "dataseed"

std::string Sanitize(std::string_view message) {
  std::string out(message);
  for (char& c : out) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return out;
}

std::string EpsilonField(const std::optional<double>& epsilon) {
  return epsilon ? FormatDouble(*epsilon) : "none";
}

absl::StatusOr<int> ParseInt(const std::string& key, const std::string& value) {
  int out = 0;
  if (!absl::SimpleAtoi(value, &out)) {
    return absl::InvalidArgumentError(
        absl::StrCat("config key '", key, "': not an integer: '", value, "'"));
  }
  return out;
}

absl::StatusOr<double> ParseReal(const std::string& key, const std::string& value) {
  double out = 0.0;
  if (!absl::SimpleAtod(value, &out)) {
    return absl::InvalidArgumentError(
        absl::StrCat("config key '", key, "': not a number: '", value, "'"));
  }
  return out;
}

absl::StatusOr<bool> ParseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  return absl::InvalidArgumentError(
      absl::StrCat("config key '", key, "': not a boolean: '", value, "'"));
}

// Bound matching the loss, or nullopt where none applies.
std::optional<double> BoundFor(LossKind loss, const MatrixXd& features,
                               const VectorXd& expected, double sigma,
                               const Bagging& bagging) {
  absl::StatusOr<double> bound = absl::UnimplementedError("no bound");
  switch (loss) {
    case LossKind::kInstanceMir:
      bound = InstanceMirBound(features, expected, sigma, bagging);
      break;
    case LossKind::kBagLlp:
      bound = BagLlpBound(features, sigma, bagging);
      break;
    case LossKind::kAggMir:
      bound = AggMirBound(features, expected, sigma, bagging);
      break;
    case LossKind::kOls:
      break;
  }
  if (!bound.ok()) return std::nullopt;
  return *bound;
}

MatrixXd SubsetRows(const MatrixXd& matrix, const std::vector<int>& rows) {
  MatrixXd out(static_cast<int>(rows.size()), matrix.cols());
  for (size_t r = 0; r < rows.size(); ++r) {
    out.row(static_cast<int>(r)) = matrix.row(rows[r]);
  }
  return out;
}

VectorXd SubsetEntries(const VectorXd& vector, const std::vector<int>& rows) {
  VectorXd out(static_cast<int>(rows.size()));
  for (size_t r = 0; r < rows.size(); ++r) out[static_cast<int>(r)] = vector[rows[r]];
  return out;
}

struct SortKey {
  int k_index;
  int method_index;
  int loss_index;
  int epsilon_index;
  int run;
  auto Tie() const {
    return std::tie(k_index, method_index, loss_index, epsilon_index, run);
  }
};

}  // namespace

absl::Status ValidateExperimentConfig(const ExperimentConfig& config) {
  if (absl::Status s = ValidateDataSpec(config.data); !s.ok()) return s;
  if (config.runs < 1) return absl::InvalidArgumentError("runs must be >= 1");
  if (config.ks.empty() || config.methods.empty() || config.losses.empty()) {
    return absl::InvalidArgumentError("k, methods and losses must be nonempty");
  }
  for (const int k : config.ks) {
    if (k < 1) return absl::InvalidArgumentError("k must be positive");
    for (const BaggingMethod method : config.methods) {
      const bool superbag = method == BaggingMethod::kSuperBagRandom ||
                            method == BaggingMethod::kSuperBagSorted;
      const bool flexible = method == BaggingMethod::kLabelKMeans && config.min_size;
      const int divisor = superbag ? 2 * k : k;
      if (!flexible && config.data.n % divisor != 0) {
        return absl::InvalidArgumentError(absl::StrCat(
            "NotDivisible(", config.data.n, ", ", divisor, ") for method ",
            std::string(BaggingMethodName(method))));
      }
    }
  }
  if (!config.epsilons.empty()) {
    if (!config.clip_bound) {
      return absl::InvalidArgumentError("private runs need clip_bound");
    }
    for (const double epsilon : config.epsilons) {
      if (absl::Status s = ValidatePrivacyParams(
              {epsilon, config.delta, *config.clip_bound});
          !s.ok()) {
        return s;
      }
    }
    for (const LossKind loss : config.losses) {
      if (loss == LossKind::kOls) {
        return absl::InvalidArgumentError("ols has no private pipeline");
      }
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<ExperimentConfig> ExperimentConfigFromMap(
    const std::map<std::string, std::string>& values) {
  ExperimentConfig config;
  for (const auto& [key, value] : values) {
    if (key == "family") {
      absl::StatusOr<FeatureFamily> family = ParseFeatureFamily(value);
      if (!family.ok()) return family.status();
      config.data.family = *family;
    } else if (key == "n" || key == "d" || key == "runs" ||
               key == "kmeans_iterations") {
      absl::StatusOr<int> parsed = ParseInt(key, value);
      if (!parsed.ok()) return parsed.status();
      if (key == "n") config.data.n = *parsed;
      if (key == "d") config.data.d = *parsed;
      if (key == "runs") config.runs = *parsed;
      if (key == "kmeans_iterations") config.kmeans.max_iterations = *parsed;
    } else if (key == "sigma" || key == "delta" || key == "clip_bound") {
      absl::StatusOr<double> parsed = ParseReal(key, value);
      if (!parsed.ok()) return parsed.status();
      if (key == "sigma") config.data.sigma = *parsed;
      if (key == "delta") config.delta = *parsed;
      if (key == "clip_bound") config.clip_bound = *parsed;
    } else if (key == "seed") {
      uint64_t seed = 0;
      if (!absl::SimpleAtoi(value, &seed)) {
        return absl::InvalidArgumentError(
            absl::StrCat("config key 'seed': not an unsigned integer: '", value, "'"));
      }
      config.master_seed = seed;
    } else if (key == "k") {
      config.ks.clear();
      for (const std::string& item : SplitList(value)) {
        absl::StatusOr<int> parsed = ParseInt(key, item);
        if (!parsed.ok()) return parsed.status();
        config.ks.push_back(*parsed);
      }
    } else if (key == "losses" || key == "loss") {
      config.losses.clear();
      for (const std::string& item : SplitList(value)) {
        absl::StatusOr<LossKind> loss = ParseLossKind(item);
        if (!loss.ok()) return loss.status();
        config.losses.push_back(*loss);
      }
    } else if (key == "methods") {
      config.methods.clear();
      for (const std::string& item : SplitList(value)) {
        absl::StatusOr<BaggingMethod> method = ParseBaggingMethod(item);
        if (!method.ok()) return method.status();
        config.methods.push_back(*method);
      }
    } else if (key == "epsilons") {
      config.epsilons.clear();
      if (value == "none") continue;
      for (const std::string& item : SplitList(value)) {
        absl::StatusOr<double> parsed = ParseReal(key, item);
        if (!parsed.ok()) return parsed.status();
        config.epsilons.push_back(*parsed);
      }
    } else if (key == "agg_route") {
      if (value == "label-free") {
        config.agg_route = AggMirRoute::kLabelFree;
      } else if (value == "clustering") {
        config.agg_route = AggMirRoute::kClustering;
      } else {
        return absl::InvalidArgumentError(absl::StrCat(
            "config key 'agg_route': expected label-free or clustering, got '",
            value, "'"));
      }
    } else if (key == "emit_bounds" || key == "fixed_data" || key == "min_size") {
      absl::StatusOr<bool> parsed = ParseBool(key, value);
      if (!parsed.ok()) return parsed.status();
      if (key == "emit_bounds") config.emit_bounds = *parsed;
      if (key == "fixed_data") config.fixed_data = *parsed;
      if (key == "min_size") config.min_size = *parsed;
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown config key '", key, "'"));
    }
  }
  return config;
}

uint64_t DataSeed(uint64_t master_seed, int run) {
  return DeriveSeed(DeriveSeed(master_seed, kDataTag), static_cast<uint64_t>(run));
}

uint64_t RunSeed(uint64_t master_seed, BaggingMethod method, int k,
                 int epsilon_index, int run) {
  uint64_t seed = DeriveSeed(master_seed, HashString(BaggingMethodName(method)));
  seed = DeriveSeed(seed, static_cast<uint64_t>(k));
  // epsilon_index is -1 for non-private cells.
  seed = DeriveSeed(seed, static_cast<uint64_t>(epsilon_index + 1));
  return DeriveSeed(seed, static_cast<uint64_t>(run));
}

absl::StatusOr<std::vector<RunRecord>> RunExperiment(
    const ExperimentConfig& config) {
  if (absl::Status s = ValidateExperimentConfig(config); !s.ok()) return s;
  std::vector<std::pair<SortKey, RunRecord>> keyed;
  const bool is_private = !config.epsilons.empty();
  const int num_epsilons = is_private ? static_cast<int>(config.epsilons.size()) : 1;

  for (int run = 0; run < config.runs; ++run) {
    DataSpec spec = config.data;
    spec.seed = DataSeed(config.master_seed, config.fixed_data ? 0 : run);
    absl::StatusOr<SyntheticData> data = GenerateSyntheticData(spec);
    if (!data.ok()) return data.status();
    const Dataset& dataset = data->dataset;
    const VectorXd& theta_star = *dataset.theta_star;
    const VectorXd& expected = *dataset.expected_labels;
    Dataset clipped;
    if (is_private) {
      clipped = dataset;
      clipped.labels = ClipLabels(dataset.labels, *config.clip_bound);
    }

    for (size_t ki = 0; ki < config.ks.size(); ++ki) {
      const int k = config.ks[ki];
      for (size_t mi = 0; mi < config.methods.size(); ++mi) {
        const BaggingMethod method = config.methods[mi];
        for (int ei = 0; ei < num_epsilons; ++ei) {
          const int epsilon_index = is_private ? ei : -1;
          const uint64_t seed =
              RunSeed(config.master_seed, method, k, epsilon_index, run);
          auto make_record = [&](LossKind loss) {
            RunRecord record;
            record.family = config.data.family;
            record.n = config.data.n;
            record.d = config.data.d;
            record.sigma = config.data.sigma;
            record.k = k;
            record.method = method;
            record.loss = loss;
            if (is_private) record.epsilon = config.epsilons[static_cast<size_t>(ei)];
            record.run = run;
            record.data_seed = spec.seed;
            record.seed = seed;
            return record;
          };
          auto emit = [&](size_t li, RunRecord record) {
            keyed.push_back({SortKey{static_cast<int>(ki), static_cast<int>(mi),
                                     static_cast<int>(li), ei, run},
                             std::move(record)});
          };

          if (!is_private) {
            BaggingRequest request;
            request.k = k;
            request.min_size = config.min_size;
            request.covariance = &data->covariance;
            request.kmeans = config.kmeans;
            Rng bagging_rng(DeriveSeed(seed, kBaggingStream));
            absl::StatusOr<SubsetBagging> bagging = BuildBagging(
                method, dataset.features, dataset.labels, request, bagging_rng);
            MatrixXd features;
            VectorXd labels;
            VectorXd expected_sub;
            if (bagging.ok()) {
              features = SubsetRows(dataset.features, bagging->instances);
              labels = SubsetEntries(dataset.labels, bagging->instances);
              expected_sub = SubsetEntries(expected, bagging->instances);
            }
            for (size_t li = 0; li < config.losses.size(); ++li) {
              const LossKind loss = config.losses[li];
              RunRecord record = make_record(loss);
              if (!bagging.ok()) {
                record.error = kNaN;
                record.status = Sanitize(bagging.status().ToString());
                emit(li, std::move(record));
                continue;
              }
              Rng label_rng(DeriveSeed(seed, kLabelStream + li));
              absl::StatusOr<ModelEstimate> estimate =
                  loss == LossKind::kOls
                      ? FitOls(dataset.features, dataset.labels)
                      : FitLoss(loss, features, bagging->bagging,
                                MakeBagLabels(labels, bagging->bagging,
                                              AggregationFor(loss), label_rng));
              if (!estimate.ok()) {
                record.error = kNaN;
                record.status = Sanitize(estimate.status().ToString());
              } else {
                record.error = *EstimationError(*estimate, theta_star);
              }
              if (config.emit_bounds && loss != LossKind::kOls) {
                record.bound = BoundFor(loss, features, expected_sub,
                                        config.data.sigma, bagging->bagging);
              }
              emit(li, std::move(record));
            }
            continue;
          }

          const PrivacyParams params{config.epsilons[static_cast<size_t>(ei)],
                                     config.delta, *config.clip_bound};
          PipelineOptions options;
          options.agg_route = config.agg_route;
          options.method = method;
          options.min_size = config.min_size;
          options.covariance = &data->covariance;
          options.kmeans = config.kmeans;
          for (size_t li = 0; li < config.losses.size(); ++li) {
            const LossKind loss = config.losses[li];
            RunRecord record = make_record(loss);
            Rng rng(DeriveSeed(seed, kPrivateStream + li));
            absl::StatusOr<PrivateRelease> release =
                PrivatePipeline(clipped, k, loss, params, rng, options);
            absl::StatusOr<ModelEstimate> estimate =
                release.ok() ? FitLoss(loss,
                                       SubsetRows(clipped.features,
                                                  release->bagging.instances),
                                       release->bagging.bagging, release->labels)
                             : absl::StatusOr<ModelEstimate>(release.status());
            if (!estimate.ok()) {
              record.error = kNaN;
              record.status = Sanitize(estimate.status().ToString());
            } else {
              record.error = *EstimationError(*estimate, theta_star);
            }
            emit(li, std::move(record));
          }
        }
      }
    }
  }

  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    return a.first.Tie() < b.first.Tie();
  });
  std::vector<RunRecord> records;
  records.reserve(keyed.size());
  for (auto& [key, record] : keyed) records.push_back(std::move(record));
  return records;
}

std::string FormatRunRecordsCsv(const std::vector<RunRecord>& records) {
  std::string out =
      "family,n,d,sigma,k,method,loss,epsilon,run,data_seed,seed,error,bound,"
      "status\n";
  for (const RunRecord& r : records) {
    absl::StrAppend(&out, std::string(FeatureFamilyName(r.family)), ",", r.n,
                    ",", r.d, ",", FormatDouble(r.sigma), ",", r.k, ",",
                    std::string(BaggingMethodName(r.method)), ",",
                    std::string(LossKindName(r.loss)), ",",
                    EpsilonField(r.epsilon), ",", r.run, ",", r.data_seed, ",",
                    r.seed, ",", FormatDouble(r.error), ",",
                    r.bound ? FormatDouble(*r.bound) : "", ",", r.status, "\n");
  }
  return out;
}

absl::StatusOr<std::pair<double, double>> MeanAndStd(
    const std::vector<double>& values) {
  if (values.empty()) return absl::InvalidArgumentError("EmptyCell");
  const double count = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / count;
  if (values.size() == 1) return std::make_pair(mean, 0.0);
  double sum_sq = 0.0;
  for (const double v : values) sum_sq += (v - mean) * (v - mean);
  return std::make_pair(mean, std::sqrt(sum_sq / (count - 1.0)));
}

std::vector<CellSummary> Summarize(const std::vector<RunRecord>& records) {
  std::vector<CellSummary> cells;
  size_t start = 0;
  while (start < records.size()) {
    const RunRecord& head = records[start];
    size_t end = start;
    std::vector<double> errors;
    std::vector<double> bounds;
    int failures = 0;
    while (end < records.size() && records[end].k == head.k &&
           records[end].method == head.method && records[end].loss == head.loss &&
           records[end].epsilon == head.epsilon) {
      if (records[end].status == "ok") {
        errors.push_back(records[end].error);
        if (records[end].bound) bounds.push_back(*records[end].bound);
      } else {
        ++failures;
      }
      ++end;
    }
    CellSummary cell;
    cell.k = head.k;
    cell.method = head.method;
    cell.loss = head.loss;
    cell.epsilon = head.epsilon;
    cell.runs = static_cast<int>(errors.size());
    cell.failures = failures;
    if (absl::StatusOr<std::pair<double, double>> stats = MeanAndStd(errors);
        stats.ok()) {
      cell.mean = stats->first;
      cell.stddev = stats->second;
    } else {
      cell.mean = cell.stddev = kNaN;
    }
    cell.mean_bound =
        bounds.empty() ? kNaN
                       : std::accumulate(bounds.begin(), bounds.end(), 0.0) /
                             static_cast<double>(bounds.size());
    cells.push_back(cell);
    start = end;
  }
  return cells;
}

std::string FormatSummaryCsv(const ExperimentConfig& config,
                             const std::vector<CellSummary>& cells) {
  std::string out =
      "family,n,d,sigma,k,method,loss,epsilon,runs,failures,mean_error,"
      "std_error,mean_bound\n";
  for (const CellSummary& c : cells) {
    absl::StrAppend(&out, std::string(FeatureFamilyName(config.data.family)),
                    ",", config.data.n, ",", config.data.d, ",",
                    FormatDouble(config.data.sigma), ",", c.k, ",",
                    std::string(BaggingMethodName(c.method)), ",",
                    std::string(LossKindName(c.loss)), ",",
                    EpsilonField(c.epsilon), ",", c.runs, ",", c.failures, ",",
                    FormatDouble(c.mean), ",", FormatDouble(c.stddev), ",",
                    FormatDouble(c.mean_bound), "\n");
  }
  return out;
}

}  // namespace optbag
