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
#include <limits>
#include <string>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "optbag/synth.h"
#include "test_util.h"

namespace optbag {
namespace {

using ::optbag::testing::MakeBagging;
using ::testing::ElementsAre;
using ::testing::HasSubstr;
using ::testing::Pair;
using ::testing::StartsWith;

TEST(FormatDoubleTest, RoundTripsAndSpecialValues) {
  const double value = 0.1 + 0.2;
  EXPECT_EQ(std::stod(FormatDouble(value)), value);
  EXPECT_EQ(FormatDouble(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(FormatDouble(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(FormatDouble(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(FormatDouble(2.0), "2");
}

TEST(DatasetCsvTest, RoundTripIsExact) {
  DataSpec spec;
  spec.n = 50;
  spec.d = 3;
  spec.seed = 4;
  const Dataset original = GenerateSyntheticData(spec)->dataset;
  const std::string text = FormatDatasetCsv(original);
  EXPECT_THAT(text, StartsWith("x0,x1,x2,y,ytilde\n"));
  absl::StatusOr<Dataset> parsed = ParseDatasetCsv(text);
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  EXPECT_EQ(parsed->features, original.features);
  EXPECT_EQ(parsed->labels, original.labels);
  // theta* is recovered by least squares, so X theta* matches to rounding.
  EXPECT_LE((*parsed->expected_labels - *original.expected_labels).lpNorm<Eigen::Infinity>(),
            1e-12);
  EXPECT_LE((*parsed->theta_star - *original.theta_star).norm(), 1e-12);
  EXPECT_TRUE(ValidateDataset(*parsed).ok());
  EXPECT_NEAR(parsed->noise_sigma, 0.5, 0.2);
}

TEST(DatasetCsvTest, UnknownNoiselessLabels) {
  const std::string text = "x0,y,ytilde\n1,2,nan\n3,4,nan\n";
  absl::StatusOr<Dataset> parsed = ParseDatasetCsv(text);
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  EXPECT_FALSE(parsed->expected_labels.has_value());
  EXPECT_FALSE(parsed->theta_star.has_value());
  EXPECT_EQ(FormatDatasetCsv(*parsed), text);
}

TEST(DatasetCsvTest, Malformed) {
  EXPECT_FALSE(ParseDatasetCsv("").ok());
  EXPECT_FALSE(ParseDatasetCsv("x0,y,ytilde\n1,2\n").ok());
  EXPECT_FALSE(ParseDatasetCsv("x0,y,ytilde\n1,abc,3\n").ok());
  EXPECT_FALSE(ParseDatasetCsv("a,b\n1,2\n").ok());
}

TEST(BaggingTextTest, RoundTripWithUnusedInstances) {
  SubsetBagging subset = WholeDataBagging(MakeBagging({{0, 2}, {1, 3}}, 4));
  subset.instances = {0, 2, 3, 5};
  subset.unused = {1, 4};
  const std::string text = FormatBagging(subset, 6);
  EXPECT_EQ(text, "0 0\n1 -1\n2 1\n3 0\n4 -1\n5 1\n");
  absl::StatusOr<SubsetBagging> parsed = ParseBagging(text, 2);
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  EXPECT_THAT(parsed->instances, ElementsAre(0, 2, 3, 5));
  EXPECT_THAT(parsed->unused, ElementsAre(1, 4));
  EXPECT_EQ(parsed->bagging, subset.bagging);
}

TEST(BaggingTextTest, Malformed) {
  EXPECT_FALSE(ParseBagging("0 0\n0 1\n", 1).ok());
  EXPECT_FALSE(ParseBagging("0 0\n5 0\n", 1).ok());
  EXPECT_FALSE(ParseBagging("0 x\n", 1).ok());
  EXPECT_FALSE(ParseBagging("0 -1\n1 -1\n", 1).ok());
  EXPECT_FALSE(ParseBagging("0 0\n1 1\n", 2).ok());
}

TEST(EstimateTest, Format) {
  ModelEstimate estimate;
  estimate.theta_hat = VectorXd::LinSpaced(2, 0.5, 1.5);
  estimate.loss_kind = LossKind::kAggMir;
  EXPECT_EQ(FormatEstimate(estimate), "loss agg-mir\ntheta 0.5 1.5\n");
}

TEST(BoundReportTest, Format) {
  EXPECT_EQ(FormatBoundReport({{"bag-llp", 2.0, 0.5, 4.0}}),
            "bound,value,empirical_error,ratio\nbag-llp,2,0.5,4\n");
}

TEST(ConfigTest, ParsesFlatKeyValues) {
  absl::StatusOr<std::map<std::string, std::string>> config =
      ParseConfig("# comment\n n = 100\n\nmethods = random, label-kmeans\n");
  ASSERT_TRUE(config.ok()) << config.status();
  EXPECT_THAT(*config, ElementsAre(Pair("methods", "random, label-kmeans"), Pair("n", "100")));
  EXPECT_THAT(SplitList("random, label-kmeans,,"), ElementsAre("random", "label-kmeans"));
}

TEST(ConfigTest, Errors) {
  EXPECT_THAT(std::string(ParseConfig("n 100\n").status().message()), HasSubstr("line 1"));
  EXPECT_THAT(std::string(ParseConfig("n = 1\nn = 2\n").status().message()),
              HasSubstr("duplicate key 'n'"));
  EXPECT_FALSE(ParseConfig(" = 3\n").ok());
}

TEST(FileTest, WriteThenRead) {
  const std::string path = ::testing::TempDir() + "/optbag_io_test.txt";
  ASSERT_TRUE(WriteFile(path, "hello\n").ok());
  EXPECT_EQ(*ReadFile(path), "hello\n");
  EXPECT_EQ(ReadFile(path + ".missing").status().code(), absl::StatusCode::kNotFound);
}

}  // namespace
}  // namespace optbag
