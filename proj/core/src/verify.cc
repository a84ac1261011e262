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

#include "optbag/verify.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include "absl/strings/str_format.h"
#include "optbag/bagging.h"
#include "optbag/bounds.h"
#include "optbag/data_model.h"
#include "optbag/estimators.h"
#include "optbag/glm.h"
#include "optbag/privacy.h"
#include "optbag/rng.h"
#include "optbag/synth.h"

namespace optbag {
namespace {

using Clock = std::chrono::steady_clock;

CheckResult Finish(std::string name, bool passed, std::string detail,
                   Clock::time_point start) {
  CheckResult result;
  result.name = std::move(name);
  result.passed = passed;
  result.detail = std::move(detail);
  result.seconds =
      std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

double Relative(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

MatrixXd GaussianMatrix(int rows, int cols, Rng& rng, double scale = 1.0) {
  MatrixXd out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) out(i, j) = scale * rng.Gaussian();
  }
  return out;
}

VectorXd GaussianVector(int size, Rng& rng, double scale = 1.0) {
  VectorXd out(size);
  for (int i = 0; i < size; ++i) out[i] = scale * rng.Gaussian();
  return out;
}

// Random partition with every bag of size in [k, 2k].
Bagging RandomMinSizeBagging(int n, int k, Rng& rng) {
  const std::vector<int> order = rng.Permutation(n);
  std::vector<std::vector<int>> bags;
  int start = 0;
  while (start < n) {
    const int remaining = n - start;
    int size = remaining;
    if (remaining >= 2 * k) {
      size = k + rng.UniformInt(std::min(k + 1, remaining - 2 * k + 1));
    }
    bags.emplace_back(order.begin() + start, order.begin() + start + size);
    start += size;
  }
  return *Bagging::FromBags(std::move(bags), n, k);
}

double BlockLoss(const std::vector<double>& values, const std::vector<int>& block) {
  double mean = 0.0;
  for (const int i : block) mean += values[static_cast<size_t>(i)];
  mean /= static_cast<double>(block.size());
  double loss = 0.0;
  for (const int i : block) {
    loss += (values[static_cast<size_t>(i)] - mean) * (values[static_cast<size_t>(i)] - mean);
  }
  return loss;
}

// Minimum k-means loss over all set partitions of the values whose blocks
// have size >= k (or exactly k).
double BruteForceOptimum(const std::vector<double>& values, int k, bool exact) {
  const int n = static_cast<int>(values.size());
  std::vector<std::vector<int>> blocks;
  double best = std::numeric_limits<double>::infinity();
  std::function<void(int)> place = [&](int i) {
    if (i == n) {
      double loss = 0.0;
      for (const auto& block : blocks) {
        const int size = static_cast<int>(block.size());
        if (size < k || (exact && size != k)) return;
        loss += BlockLoss(values, block);
      }
      best = std::min(best, loss);
      return;
    }
    // Indexed: the recursion appends to `blocks`.
    const size_t open = blocks.size();
    for (size_t b = 0; b < open; ++b) {
      if (exact && static_cast<int>(blocks[b].size()) == k) continue;
      blocks[b].push_back(i);
      place(i + 1);
      blocks[b].pop_back();
    }
    blocks.push_back({i});
    place(i + 1);
    blocks.pop_back();
  };
  place(0);
  return best;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe MeanAndStandardError(const std::vector<double>& samples) {
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (const double s : samples) ss += (s - mean) * (s - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

CheckResult CheckExactOptimum(uint64_t seed) {
  const auto start = Clock::now();
  Rng rng(seed);
  int cases = 0;
  int failures = 0;
  double worst = 0.0;
  for (const int k : {2, 3}) {
    for (int n = k; n <= 8; ++n) {
      for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> values(static_cast<size_t>(n));
        for (double& v : values) v = rng.Gaussian();
        const double brute_min = BruteForceOptimum(values, k, false);
        absl::StatusOr<Bagging> min_size = LabelKMeansMinSize(values, k);
        const double got_min =
            min_size.ok() ? KMeansObjective1d(values, *min_size) : -1.0;
        const double gap_min = std::abs(got_min - brute_min);
        worst = std::max(worst, gap_min);
        ++cases;
        if (!min_size.ok() || gap_min > 1e-9) ++failures;
        if (n % k == 0) {
          const double brute_eq = BruteForceOptimum(values, k, true);
          absl::StatusOr<Bagging> equal = LabelKMeansEqual(values, k);
          const double got_eq = equal.ok() ? KMeansObjective1d(values, *equal) : -1.0;
          const double gap_eq = std::abs(got_eq - brute_eq);
          worst = std::max(worst, gap_eq);
          ++cases;
          if (!equal.ok() || gap_eq > 1e-9) ++failures;
        }
      }
    }
  }
  return Finish("exact 1d optimum vs exhaustive search", failures == 0,
                absl::StrFormat("%d/%d cases match, max gap %.3g", cases - failures,
                                cases, worst),
                start);
}

CheckResult CheckBaggingIdentities(uint64_t seed) {
  const auto start = Clock::now();
  Rng rng(seed);
  constexpr double kTol = 1e-9;
  double worst[6] = {0, 0, 0, 0, 0, 0};
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + rng.UniformInt(4);
    const int m = 4 + rng.UniformInt(9);
    const int n = k * m;
    const int d = 1 + rng.UniformInt(5);
    const MatrixXd x = GaussianMatrix(n, d, rng);
    const VectorXd theta = GaussianVector(d, rng);
    const VectorXd ytilde = x * theta;
    const Bagging unequal = RandomMinSizeBagging(n, 2, rng);
    const Bagging equal = *RandomBagging(n, k, rng);

    // k-means equivalence.
    double sum_term = 0.0;
    for (int l = 0; l < unequal.num_bags(); ++l) {
      double s = 0.0;
      for (const int i : unequal.bag(l)) s += ytilde[i];
      sum_term += s * s / unequal.bag_size(l);
    }
    worst[0] = std::max(worst[0], Relative(ytilde.squaredNorm() - sum_term,
                                           KMeansObjective1d(ytilde, unequal)));

    // E||A X theta*||^2 by exact enumeration of each bag's released member.
    double expectation = 0.0;
    AttributionDraw draw;
    for (int l = 0; l < unequal.num_bags(); ++l) {
      draw.chosen.push_back(unequal.bag(l)[0]);
    }
    for (int l = 0; l < unequal.num_bags(); ++l) {
      for (const int c : unequal.bag(l)) {
        draw.chosen[static_cast<size_t>(l)] = c;
        const VectorXd released =
            Broadcast(unequal, MirBagLabels(ytilde, unequal, draw).values);
        double bag_energy = 0.0;
        for (const int i : unequal.bag(l)) bag_energy += released[i] * released[i];
        expectation += bag_energy / unequal.bag_size(l);
      }
      draw.chosen[static_cast<size_t>(l)] = unequal.bag(l)[0];
    }
    worst[1] = std::max(worst[1], Relative(expectation, ytilde.squaredNorm()));

    // Quadratic form of the smoothing matrix.
    const SparseMatrix s = InstanceSmoothingMatrix(unequal);
    const double quad = ytilde.dot(s * ytilde);
    worst[2] = std::max(worst[2], Relative(quad, sum_term));

    // S = M^T M.
    const SparseMatrix root = RootBaggingMatrix(unequal);
    const MatrixXd product = MatrixXd(root.transpose()) * MatrixXd(root);
    const double diff = (MatrixXd(s) - product).cwiseAbs().maxCoeff();
    worst[3] = std::max(worst[3], diff / MatrixXd(s).cwiseAbs().maxCoeff());

    // Per-direction decomposition over a random orthonormal basis.
    const Eigen::HouseholderQR<MatrixXd> qr(GaussianMatrix(d, d, rng));
    const MatrixXd basis = qr.householderQ() * MatrixXd::Identity(d, d);
    double directional = 0.0;
    for (int j = 0; j < d; ++j) {
      directional += KMeansObjective1d(VectorXd(x * basis.col(j)), unequal);
    }
    worst[4] = std::max(worst[4], Relative(directional, KMeansObjective(x, unequal)));

    // Centroid variance decomposition on centered data.
    const MatrixXd centered = x.rowwise() - x.colwise().mean();
    VectorXd z = GaussianVector(d, rng);
    z.normalize();
    absl::StatusOr<VarianceDecomposition> decomposition =
        VarianceDecompositionCheck(centered, equal, z);
    worst[5] = std::max(worst[5], decomposition.ok() ? decomposition->relative : 1.0);
  }
  const bool passed = *std::max_element(worst, worst + 6) < kTol;
  return Finish(
      "bagging identities (100 instances)", passed,
      absl::StrFormat("max relative residual: kmeans-equiv %.2g, attribution "
                      "%.2g, smoothing %.2g, S=MtM %.2g, per-direction %.2g, "
                      "variance %.2g",
                      worst[0], worst[1], worst[2], worst[3], worst[4], worst[5]),
      start);
}

CheckResult CheckNoisyClusteringShift(uint64_t seed) {
  const auto start = Clock::now();
  Rng rng(seed);
  constexpr int kN = 1000;
  constexpr int kK = 10;
  constexpr double kSigma = 0.5;
  constexpr int kDraws = 5000;
  const VectorXd ytilde = GaussianVector(kN, rng, 3.0);
  const Bagging bagging = *LabelKMeansEqual(
      std::span<const double>(ytilde.data(), static_cast<size_t>(kN)), kK);
  const double base = KMeansObjective1d(ytilde, bagging);
  std::vector<double> shifts;
  shifts.reserve(kDraws);
  for (int draw = 0; draw < kDraws; ++draw) {
    VectorXd y = ytilde;
    for (int i = 0; i < kN; ++i) y[i] += kSigma * rng.Gaussian();
    shifts.push_back(KMeansObjective1d(y, bagging) - base);
  }
  const MeanSe stats = MeanAndStandardError(shifts);
  const double target = (kN - kN / kK) * kSigma * kSigma;
  const bool passed = std::abs(stats.mean - target) <= 4.0 * stats.se;
  return Finish("noisy clustering shift", passed,
                absl::StrFormat("mean %.4f vs %.1f, SE %.4f, z=%.2f", stats.mean,
                                target, stats.se,
                                (stats.mean - target) / stats.se),
                start);
}

CheckResult CheckBoundDomination(uint64_t seed) {
  const auto start = Clock::now();
  Rng rng(seed);
  constexpr int kN = 200;
  constexpr int kD = 4;
  constexpr int kK = 5;
  constexpr double kSigma = 0.5;
  constexpr int kDraws = 500;
  int ok_instance = 0;
  int ok_llp = 0;
  int ok_agg = 0;
  double ratio_instance = 1e300;
  double ratio_llp = 1e300;
  double ratio_agg = 1e300;
  for (int trial = 0; trial < 100; ++trial) {
    const MatrixXd x = GaussianMatrix(kN, kD, rng);
    const VectorXd theta = GaussianVector(kD, rng);
    const VectorXd ytilde = x * theta;
    const Bagging bagging = *RandomBagging(kN, kK, rng);
    double instance_error = 0.0;
    double agg_error = 0.0;
    for (int draw = 0; draw < kDraws; ++draw) {
      VectorXd y = ytilde;
      for (int i = 0; i < kN; ++i) y[i] += kSigma * rng.Gaussian();
      const AggregateLabels labels =
          MirBagLabels(y, bagging, SampleAttribution(bagging, rng));
      instance_error += *EstimationError(*FitInstanceMir(x, bagging, labels), theta);
      agg_error += *EstimationError(*FitAggMir(x, bagging, labels), theta);
    }
    instance_error /= kDraws;
    agg_error /= kDraws;
    const double instance_bound = *InstanceMirBound(x, ytilde, kSigma, bagging);
    const double agg_bound = *AggMirBound(x, ytilde, kSigma, bagging);
    const double llp_bound = *BagLlpBound(x, kSigma, bagging);
    const double llp_exact = *BagLlpExpectedError(x, kSigma, bagging);
    ok_instance += instance_bound >= instance_error;
    ok_agg += agg_bound >= agg_error;
    ok_llp += llp_bound >= llp_exact;
    ratio_instance = std::min(ratio_instance, instance_bound / instance_error);
    ratio_agg = std::min(ratio_agg, agg_bound / agg_error);
    ratio_llp = std::min(ratio_llp, llp_bound / llp_exact);
  }
  const bool passed = ok_instance == 100 && ok_llp == 100 && ok_agg == 100;
  return Finish(
      "bound domination (100 instances)", passed,
      absl::StrFormat("instance-mir %d/100 (min ratio %.3g), bag-llp %d/100 "
                      "(%.3g), agg-mir %d/100 (%.3g)",
                      ok_instance, ratio_instance, ok_llp, ratio_llp, ok_agg,
                      ratio_agg),
      start);
}

CheckResult CheckSuperBagDelta(uint64_t seed) {
  const auto start = Clock::now();
  Rng rng(seed);
  double worst_gap = 0.0;
  double most_negative = 0.0;
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 1 + rng.UniformInt(6);
    std::vector<double> values(static_cast<size_t>(2 * k));
    const double scale = std::exp(rng.Uniform(-2.0, 2.0));
    for (double& v : values) v = scale * rng.Gaussian();
    const std::vector<int> order = rng.Permutation(2 * k);
    const std::span<const int> all(order);
    absl::StatusOr<SuperBagDeltaValue> delta = SuperBagDelta(
        values, all.subspan(0, static_cast<size_t>(k)), all.subspan(static_cast<size_t>(k)));
    if (!delta.ok()) {
      ++failures;
      continue;
    }
    const double gap = std::abs(delta->closed_form - delta->direct);
    worst_gap = std::max(worst_gap, gap);
    most_negative = std::min({most_negative, delta->closed_form, delta->direct});
    if (gap > 1e-10 || delta->closed_form < -1e-12 || delta->direct < -1e-12) {
      ++failures;
    }
  }
  return Finish("super-bag delta", failures == 0,
                absl::StrFormat("%d/1000 pass, max |closed - direct| %.3g, min "
                                "delta %.3g",
                                1000 - failures, worst_gap, most_negative),
                start);
}

CheckResult CheckChernoffFloor(uint64_t seed) {
  const auto start = Clock::now();
  Rng rng(seed);
  constexpr int kN = 2000;
  constexpr int kK = 5;
  constexpr double kDelta = 0.5;
  constexpr int kDraws = 1000;
  DataSpec spec;
  spec.n = kN;
  spec.d = 8;
  spec.family = FeatureFamily::kIsotropic;
  const MatrixXd x = GenerateFeatures(spec, rng)->features;
  const ChernoffFloor floor = *ChernoffEigenFloor(x, kK, kDelta, 0.5);
  int above = 0;
  double lowest = 1e300;
  for (int draw = 0; draw < kDraws; ++draw) {
    const SubsetBagging subset = *SuperBagRandom(kN, kK, rng);
    MatrixXd rows(static_cast<int>(subset.instances.size()), x.cols());
    for (size_t p = 0; p < subset.instances.size(); ++p) {
      rows.row(static_cast<int>(p)) = x.row(subset.instances[p]);
    }
    const MatrixXd centroids = BagMeans(subset.bagging, rows);
    const double lambda_min =
        Eigen::SelfAdjointEigenSolver<MatrixXd>(centroids.transpose() * centroids,
                                                Eigen::EigenvaluesOnly)
            .eigenvalues()
            .minCoeff();
    lowest = std::min(lowest, lambda_min);
    above += lambda_min > floor.floor;
  }
  const double fraction = static_cast<double>(above) / kDraws;
  const bool passed = fraction >= 1.0 - floor.failure_prob;
  return Finish("matrix Chernoff floor", passed,
                absl::StrFormat("floor %.4g, success %.3f >= 1 - %.4g (min "
                                "lambda_min %.4g)",
                                floor.floor, fraction, floor.failure_prob, lowest),
                start);
}

CheckResult CheckPrivacyCalibration(uint64_t seed) {
  const auto start = Clock::now();
  double worst = 0.0;
  int budget_failures = 0;
  int pipelines = 0;
  for (const double epsilon : {0.1, 0.5, 1.0, 2.0, 8.0}) {
    for (const double delta : {1e-7, 1e-5, 1e-2}) {
      for (const double r : {0.5, 1.0, 4.0}) {
        for (const int k : {1, 10, 50}) {
          const PrivacyParams params{epsilon, delta, r};
          const NoiseScale mir = *NoiseScaleInstanceMir(params, k);
          const NoiseScale llp = *NoiseScaleBagLlp(params, k);
          const double mir_display =
              16.0 * r * r * std::log(1.25 / (delta / 2.0)) / (epsilon * epsilon);
          const double llp_display =
              4.0 * r * r * std::log(1.25 / delta) / (epsilon * epsilon);
          worst = std::max({worst, Relative(mir.alpha * mir.alpha, mir_display),
                            Relative(llp.alpha * llp.alpha, llp_display),
                            Relative(mir.bag_label_std, mir.alpha / k),
                            Relative(llp.bag_label_std, llp.alpha / k)});
        }
      }
    }
  }
  // Reference values at epsilon = 1, delta = 1e-5, R = 1.
  const NoiseScale mir = *NoiseScaleInstanceMir({1.0, 1e-5, 1.0}, 1);
  const NoiseScale llp = *NoiseScaleBagLlp({1.0, 1e-5, 1.0}, 1);
  const bool reference_ok = std::abs(mir.alpha * mir.alpha - 198.86) < 0.01 &&
                            std::abs(llp.alpha * llp.alpha - 46.95) < 0.01;

  Rng rng(seed);
  DataSpec spec;
  spec.n = 200;
  spec.d = 3;
  spec.seed = seed;
  SyntheticData data = *GenerateSyntheticData(spec);
  data.dataset.labels = ClipLabels(data.dataset.labels, 2.0);
  const std::vector<std::optional<BaggingMethod>> methods = {
      std::nullopt, BaggingMethod::kLabelKMeans, BaggingMethod::kRandom,
      BaggingMethod::kInstanceKMeans, BaggingMethod::kScaledInstanceKMeans,
      BaggingMethod::kSuperBagRandom, BaggingMethod::kSuperBagSorted};
  for (const LossKind loss :
       {LossKind::kInstanceMir, LossKind::kBagLlp, LossKind::kAggMir}) {
    for (const AggMirRoute route : {AggMirRoute::kLabelFree, AggMirRoute::kClustering}) {
      for (const auto& method : methods) {
        for (const double epsilon : {0.5, 1.0, 2.0}) {
          PipelineOptions options;
          options.agg_route = route;
          options.method = method;
          options.covariance = &data.covariance;
          const PrivacyParams params{epsilon, 1e-5, 2.0};
          absl::StatusOr<PrivateRelease> release =
              PrivatePipeline(data.dataset, 5, loss, params, rng, options);
          ++pipelines;
          if (!release.ok() ||
              release->ledger.spent_epsilon() > epsilon * (1 + 1e-12) ||
              release->ledger.spent_delta() > 1e-5 * (1 + 1e-12)) {
            ++budget_failures;
          }
        }
      }
    }
  }
  const bool passed = worst <= 1e-12 && reference_ok && budget_failures == 0;
  return Finish("privacy calibration and budget", passed,
                absl::StrFormat("max relative formula gap %.3g, reference "
                                "values %s, %d/%d pipelines within budget",
                                worst, reference_ok ? "ok" : "off",
                                pipelines - budget_failures, pipelines),
                start);
}

CheckResult CheckGlm(uint64_t seed) {
  const auto start = Clock::now();
  Rng rng(seed);
  const GlmFamily families[] = {GlmFamily::Gaussian(), GlmFamily::Logistic(),
                                GlmFamily::Poisson()};
  std::vector<std::string> problems;

  // Gradients against central differences of the negative log-likelihood.
  double worst_gradient = 0.0;
  for (const GlmFamily& family : families) {
    for (int trial = 0; trial < 50; ++trial) {
      const int k = 3;
      const int n = k * (10 + rng.UniformInt(10));
      const int d = 1 + rng.UniformInt(4);
      const MatrixXd x = GaussianMatrix(n, d, rng, 0.5);
      const Bagging bagging = *RandomBagging(n, k, rng);
      const VectorXd theta = GaussianVector(d, rng);
      const VectorXd y = SampleGlmLabels(x * theta, family, rng);
      const AggregateLabels labels =
          MirBagLabels(y, bagging, SampleAttribution(bagging, rng));
      const VectorXd broadcast = Broadcast(bagging, labels.values);
      const MatrixXd centroids = BagMeans(bagging, x);
      const VectorXd probe = GaussianVector(d, rng);
      const VectorXd g_instance =
          *GlmInstanceMirGradient(x, bagging, broadcast, probe, family);
      const VectorXd g_agg =
          *GlmAggMirGradient(x, bagging, labels.values, probe, family);
      VectorXd fd_instance(d);
      VectorXd fd_agg(d);
      for (int j = 0; j < d; ++j) {
        const double h = 1e-5 * std::max(1.0, std::abs(probe[j]));
        VectorXd plus = probe;
        VectorXd minus = probe;
        plus[j] += h;
        minus[j] -= h;
        fd_instance[j] = -(GlmNegLogLikelihood(x, broadcast, plus, family) -
                           GlmNegLogLikelihood(x, broadcast, minus, family)) /
                         (2 * h);
        fd_agg[j] = -(GlmNegLogLikelihood(centroids, labels.values, plus, family) -
                      GlmNegLogLikelihood(centroids, labels.values, minus, family)) /
                    (2 * h);
      }
      worst_gradient = std::max(
          {worst_gradient,
           (g_instance - fd_instance).norm() / std::max(1.0, g_instance.norm()),
           (g_agg - fd_agg).norm() / std::max(1.0, g_agg.norm())});
    }
  }
  if (worst_gradient > 1e-5) {
    problems.push_back(absl::StrFormat("gradient gap %.3g", worst_gradient));
  }

  // Gaussian family against the closed-form linear estimators.
  double worst_linear = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 5;
    const int n = 200;
    const int d = 4;
    const MatrixXd x = GaussianMatrix(n, d, rng);
    const VectorXd theta = GaussianVector(d, rng);
    VectorXd y = x * theta;
    for (int i = 0; i < n; ++i) y[i] += 0.5 * rng.Gaussian();
    const Bagging bagging = *RandomBagging(n, k, rng);
    const AggregateLabels labels =
        MirBagLabels(y, bagging, SampleAttribution(bagging, rng));
    const VectorXd glm_instance =
        FitGlmInstanceMir(x, bagging, labels, families[0])->estimate.theta_hat;
    const VectorXd glm_agg =
        FitGlmAggMir(x, bagging, labels, families[0])->estimate.theta_hat;
    const VectorXd lin_instance = FitInstanceMir(x, bagging, labels)->theta_hat;
    const VectorXd lin_agg = FitAggMir(x, bagging, labels)->theta_hat;
    worst_linear = std::max(
        {worst_linear,
         (glm_instance - lin_instance).norm() / std::max(1.0, lin_instance.norm()),
         (glm_agg - lin_agg).norm() / std::max(1.0, lin_agg.norm())});
  }
  if (worst_linear > 1e-6) {
    problems.push_back(absl::StrFormat("gaussian vs linear %.3g", worst_linear));
  }

  // Gradient-norm bounds at theta*.
  int bound_ok = 0;
  int bound_cases = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const GlmFamily& family = families[trial % 3];
    const int n = 200;
    const int d = 4;
    const int k = 5;
    const MatrixXd x = GaussianMatrix(n, d, rng, 0.5);
    const VectorXd theta = GaussianVector(d, rng);
    const Bagging bagging = *RandomBagging(n, k, rng);
    const MatrixXd centroids = BagMeans(bagging, x);
    const VectorXd eta = x * theta;
    double instance_norm2 = 0.0;
    double agg_norm2 = 0.0;
    constexpr int kDraws = 500;
    for (int draw = 0; draw < kDraws; ++draw) {
      const VectorXd y = SampleGlmLabels(eta, family, rng);
      const AggregateLabels labels =
          MirBagLabels(y, bagging, SampleAttribution(bagging, rng));
      instance_norm2 += GlmScore(x, Broadcast(bagging, labels.values), theta, family)
                            .squaredNorm();
      agg_norm2 += GlmScore(centroids, labels.values, theta, family).squaredNorm();
    }
    instance_norm2 /= kDraws;
    agg_norm2 /= kDraws;
    bound_ok += *GlmInstanceMirBound(x, bagging, theta, family) >= instance_norm2;
    bound_ok += *GlmAggMirBound(x, bagging, theta, family) >= agg_norm2;
    bound_cases += 2;
  }
  if (bound_ok != bound_cases) {
    problems.push_back(absl::StrFormat("bounds %d/%d", bound_ok, bound_cases));
  }

  // Jensen gap against the range objective.
  int jensen_ok = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const GlmFamily& family = families[trial % 3];
    const int k = 2 + rng.UniformInt(4);
    const int n = k * (2 + rng.UniformInt(8));
    const int d = 1 + rng.UniformInt(4);
    const MatrixXd x = GaussianMatrix(n, d, rng);
    const VectorXd theta = GaussianVector(d, rng);
    const Bagging bagging = *RandomBagging(n, k, rng);
    const VectorXd mu = family.BPrime(VectorXd(x * theta));
    const double range = GlmRangeObjective(
        std::span<const double>(mu.data(), static_cast<size_t>(n)), bagging);
    const double gap = JensenGap(x, bagging, theta, family);
    jensen_ok += gap <= range * (1.0 + 1e-12) + 1e-300;
  }
  if (jensen_ok != 1000) {
    problems.push_back(absl::StrFormat("jensen %d/1000", jensen_ok));
  }

  // Strong-convexity inequality for logistic instance-MIR fits.
  int convex_ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 200;
    const int d = 3;
    const int k = 5;
    const MatrixXd x = GaussianMatrix(n, d, rng);
    const VectorXd theta = GaussianVector(d, rng, 0.5);
    const Bagging bagging = *RandomBagging(n, k, rng);
    const VectorXd y = SampleGlmLabels(x * theta, families[1], rng);
    const AggregateLabels labels =
        MirBagLabels(y, bagging, SampleAttribution(bagging, rng));
    absl::StatusOr<GlmFit> fit = FitGlmInstanceMir(x, bagging, labels, families[1]);
    if (!fit.ok()) continue;
    absl::StatusOr<StrongConvexityGapResult> gap =
        StrongConvexityGap(x, bagging, labels, GlmLoss::kInstanceMir,
                           fit->estimate.theta_hat, theta, families[1]);
    convex_ok += gap.ok() && gap->holds();
  }
  if (convex_ok != 100) {
    problems.push_back(absl::StrFormat("strong convexity %d/100", convex_ok));
  }

  std::string detail = absl::StrFormat(
      "gradient gap %.2g, gaussian gap %.2g, bounds %d/%d, jensen %d/1000, "
      "strong convexity %d/100",
      worst_gradient, worst_linear, bound_ok, bound_cases, jensen_ok, convex_ok);
  return Finish("GLM checks", problems.empty(), detail, start);
}

std::vector<CheckResult> RunVerifySuite(uint64_t seed) {
  return {CheckExactOptimum(DeriveSeed(seed, 1)),
          CheckBaggingIdentities(DeriveSeed(seed, 2)),
          CheckNoisyClusteringShift(DeriveSeed(seed, 3)),
          CheckBoundDomination(DeriveSeed(seed, 4)),
          CheckSuperBagDelta(DeriveSeed(seed, 5)),
          CheckChernoffFloor(DeriveSeed(seed, 6)),
          CheckPrivacyCalibration(DeriveSeed(seed, 9)),
          CheckGlm(DeriveSeed(seed, 10))};
}

}  // namespace optbag
