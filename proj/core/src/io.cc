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

#include "optbag/io.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "optbag/linalg.h"

namespace optbag {
namespace {

absl::StatusOr<double> ParseNumber(absl::string_view token, int line) {
  const absl::string_view trimmed = absl::StripAsciiWhitespace(token);
  if (trimmed == "nan") return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  if (!absl::SimpleAtod(trimmed, &value)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "line ", line, ": cannot parse number '", std::string(trimmed), "'"));
  }
  return value;
}

std::vector<absl::string_view> NonEmptyLines(std::string_view text) {
  std::vector<absl::string_view> lines;
  for (absl::string_view line :
       absl::StrSplit(absl::string_view(text.data(), text.size()), '\n')) {
    line = absl::StripAsciiWhitespace(line);
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::string FormatDouble(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return absl::StrFormat("%.17g", value);
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) return absl::DataLossError(absl::StrCat("short write to ", path));
  return absl::OkStatus();
}

std::string FormatDatasetCsv(const Dataset& dataset) {
  std::string out;
  for (int j = 0; j < dataset.d(); ++j) absl::StrAppend(&out, "x", j, ",");
  out += "y,ytilde\n";
  for (int i = 0; i < dataset.n(); ++i) {
    for (int j = 0; j < dataset.d(); ++j) {
      absl::StrAppend(&out, FormatDouble(dataset.features(i, j)), ",");
    }
    const double ytilde = dataset.expected_labels
                              ? (*dataset.expected_labels)[i]
                              : std::numeric_limits<double>::quiet_NaN();
    absl::StrAppend(&out, FormatDouble(dataset.labels[i]), ",",
                    FormatDouble(ytilde), "\n");
  }
  return out;
}

absl::Status WriteDatasetCsv(const std::string& path, const Dataset& dataset) {
  return WriteFile(path, FormatDatasetCsv(dataset));
}

absl::StatusOr<Dataset> ParseDatasetCsv(std::string_view text) {
  const std::vector<absl::string_view> lines = NonEmptyLines(text);
  if (lines.empty()) return absl::InvalidArgumentError("empty dataset file");
  const std::vector<absl::string_view> header = absl::StrSplit(lines[0], ',');
  const int columns = static_cast<int>(header.size());
  const int d = columns - 2;
  if (d < 1 || absl::StripAsciiWhitespace(header[static_cast<size_t>(d)]) != "y" ||
      absl::StripAsciiWhitespace(header[static_cast<size_t>(d) + 1]) != "ytilde") {
    return absl::InvalidArgumentError(
        "dataset header must be x0,...,x{d-1},y,ytilde");
  }
  const int n = static_cast<int>(lines.size()) - 1;
  Dataset dataset;
  dataset.features.resize(n, d);
  dataset.labels.resize(n);
  VectorXd expected(n);
  for (int i = 0; i < n; ++i) {
    const std::vector<absl::string_view> fields =
        absl::StrSplit(lines[static_cast<size_t>(i) + 1], ',');
    if (static_cast<int>(fields.size()) != columns) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", i + 2, ": expected ", columns, " fields, got ", fields.size()));
    }
    for (int j = 0; j < columns; ++j) {
      absl::StatusOr<double> value = ParseNumber(fields[static_cast<size_t>(j)], i + 2);
      if (!value.ok()) return value.status();
      if (j < d) {
        dataset.features(i, j) = *value;
      } else if (j == d) {
        dataset.labels[i] = *value;
      } else {
        expected[i] = *value;
      }
    }
  }
  if (!dataset.features.allFinite() || !dataset.labels.allFinite()) {
    return absl::InvalidArgumentError("features and labels must be finite");
  }
  if (n > 0 && expected.allFinite()) {
    absl::StatusOr<NormalEquationsSolver> solver =
        NormalEquationsSolver::Create(dataset.features);
    if (solver.ok()) {
      dataset.theta_star = solver->SolveLeastSquares(expected);
      // Store X theta* so the dataset invariant holds exactly.
      dataset.expected_labels = VectorXd(dataset.features * *dataset.theta_star);
    } else {
      dataset.expected_labels = expected;
    }
    if (n > 1) {
      const VectorXd noise = dataset.labels - expected;
      const double mean = noise.mean();
      dataset.noise_sigma =
          std::sqrt((noise.array() - mean).square().sum() / (n - 1));
    }
  }
  return dataset;
}

absl::StatusOr<Dataset> ReadDatasetCsv(const std::string& path) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  return ParseDatasetCsv(*text);
}

std::string FormatBagging(const SubsetBagging& subset, int num_instances) {
  std::vector<int> bag_of(static_cast<size_t>(num_instances), -1);
  const std::vector<std::vector<int>> bags = GlobalBags(subset);
  for (size_t l = 0; l < bags.size(); ++l) {
    for (const int i : bags[l]) bag_of[static_cast<size_t>(i)] = static_cast<int>(l);
  }
  std::string out;
  for (int i = 0; i < num_instances; ++i) {
    absl::StrAppend(&out, i, " ", bag_of[static_cast<size_t>(i)], "\n");
  }
  return out;
}

absl::Status WriteBagging(const std::string& path, const SubsetBagging& subset,
                          int num_instances) {
  return WriteFile(path, FormatBagging(subset, num_instances));
}

absl::StatusOr<SubsetBagging> ParseBagging(std::string_view text, int min_size) {
  const std::vector<absl::string_view> lines = NonEmptyLines(text);
  const int n = static_cast<int>(lines.size());
  std::vector<int> bag_of(static_cast<size_t>(n), -2);
  for (int r = 0; r < n; ++r) {
    const std::vector<absl::string_view> fields = absl::StrSplit(
        lines[static_cast<size_t>(r)], ' ', absl::SkipEmpty());
    int instance = 0;
    int bag = 0;
    if (fields.size() != 2 || !absl::SimpleAtoi(fields[0], &instance) ||
        !absl::SimpleAtoi(fields[1], &bag)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", r + 1, ": expected 'instance_index bag_index'"));
    }
    if (instance < 0 || instance >= n || bag_of[static_cast<size_t>(instance)] != -2) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", r + 1, ": instance ", instance, " out of range or repeated"));
    }
    if (bag < -1) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", r + 1, ": bag index ", bag, " < -1"));
    }
    bag_of[static_cast<size_t>(instance)] = bag;
  }
  SubsetBagging out = WholeDataBagging(*Bagging::FromAssignment(std::vector<int>{0}, 1));
  out.instances.clear();
  std::vector<int> local;
  for (int i = 0; i < n; ++i) {
    if (bag_of[static_cast<size_t>(i)] < 0) {
      out.unused.push_back(i);
    } else {
      out.instances.push_back(i);
      local.push_back(bag_of[static_cast<size_t>(i)]);
    }
  }
  if (local.empty()) return absl::InvalidArgumentError("no instance is bagged");
  absl::StatusOr<Bagging> bagging = Bagging::FromAssignment(local, min_size);
  if (!bagging.ok()) return bagging.status();
  out.bagging = *std::move(bagging);
  return out;
}

absl::StatusOr<SubsetBagging> ReadBagging(const std::string& path, int min_size) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  return ParseBagging(*text, min_size);
}

std::string FormatEstimate(const ModelEstimate& estimate) {
  std::string out = absl::StrCat("loss ", std::string(LossKindName(estimate.loss_kind)),
                                 "\ntheta");
  for (int j = 0; j < estimate.theta_hat.size(); ++j) {
    absl::StrAppend(&out, " ", FormatDouble(estimate.theta_hat[j]));
  }
  out += "\n";
  return out;
}

std::string FormatBoundReport(const std::vector<BoundReportRow>& rows) {
  std::string out = "bound,value,empirical_error,ratio\n";
  for (const BoundReportRow& row : rows) {
    absl::StrAppend(&out, row.bound, ",", FormatDouble(row.value), ",",
                    FormatDouble(row.empirical_error), ",",
                    FormatDouble(row.ratio), "\n");
  }
  return out;
}

absl::StatusOr<std::map<std::string, std::string>> ParseConfig(
    std::string_view text) {
  std::map<std::string, std::string> out;
  int number = 0;
  for (absl::string_view line :
       absl::StrSplit(absl::string_view(text.data(), text.size()), '\n')) {
    ++number;
    line = absl::StripAsciiWhitespace(line);
    if (line.empty() || line.front() == '#') continue;
    const size_t eq = line.find('=');
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("config line ", number, ": expected 'key = value'"));
    }
    std::string key(absl::StripAsciiWhitespace(line.substr(0, eq)));
    std::string value(absl::StripAsciiWhitespace(line.substr(eq + 1)));
    if (key.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("config line ", number, ": empty key"));
    }
    if (!out.emplace(key, std::move(value)).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("config line ", number, ": duplicate key '", key, "'"));
    }
  }
  return out;
}

std::vector<std::string> SplitList(std::string_view value) {
  std::vector<std::string> out;
  for (absl::string_view item :
       absl::StrSplit(absl::string_view(value.data(), value.size()), ',')) {
    item = absl::StripAsciiWhitespace(item);
    if (!item.empty()) out.emplace_back(item);
  }
  return out;
}

}  // namespace optbag
