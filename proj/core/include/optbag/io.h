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

#ifndef OPTBAG_IO_H_
#define OPTBAG_IO_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "optbag/bagging.h"
#include "optbag/data_model.h"
#include "optbag/estimators.h"

namespace optbag {

// Dataset text format: header "x0,...,x{d-1},y,ytilde", then one instance per
// line. Values are written with 17 significant digits so they round-trip.
// An unknown ytilde is written as "nan".
std::string FormatDatasetCsv(const Dataset& dataset);
absl::Status WriteDatasetCsv(const std::string& path, const Dataset& dataset);

// Parses the dataset format. When every ytilde is finite, theta* is recovered
// by least squares of ytilde on X and noise_sigma is set to the sample
// standard deviation of y - ytilde.
absl::StatusOr<Dataset> ParseDatasetCsv(std::string_view text);
absl::StatusOr<Dataset> ReadDatasetCsv(const std::string& path);

// Bagging text format: one line "instance_index bag_index" per instance of
// the full data set, with bag_index -1 for instances outside every bag.
std::string FormatBagging(const SubsetBagging& subset, int num_instances);
absl::Status WriteBagging(const std::string& path, const SubsetBagging& subset,
                          int num_instances);
absl::StatusOr<SubsetBagging> ParseBagging(std::string_view text, int min_size);
absl::StatusOr<SubsetBagging> ReadBagging(const std::string& path, int min_size);

// "loss <name>" then "theta v0 v1 ...".
std::string FormatEstimate(const ModelEstimate& estimate);

struct BoundReportRow {
  std::string bound;
  double value = 0.0;
  double empirical_error = 0.0;
  double ratio = 0.0;  // value / empirical_error
};

// Header "bound,value,empirical_error,ratio".
std::string FormatBoundReport(const std::vector<BoundReportRow>& rows);

// Flat "key = value" lines. Blank lines and lines starting with '#' are
// skipped. Duplicate keys and lines without '=' are errors.
absl::StatusOr<std::map<std::string, std::string>> ParseConfig(
    std::string_view text);

// Comma-separated list with surrounding whitespace removed; empty items are
// dropped.
std::vector<std::string> SplitList(std::string_view value);

absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, std::string_view contents);

// "%.17g", or "nan"/"inf"/"-inf".
std::string FormatDouble(double value);

}  // namespace optbag

#endif  // OPTBAG_IO_H_
