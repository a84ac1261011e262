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

#include "optbag/bagging.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "optbag/linalg.h"

namespace optbag {
namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kInf = std::numeric_limits<double>::infinity();

absl::Status CheckDivisible(int n, int k) {
  if (k < 1) return absl::InvalidArgumentError("k must be positive");
  if (n < 1 || n % k != 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("NotDivisible(", n, ", ", k, ")"));
  }
  return absl::OkStatus();
}

std::vector<int> StableOrder(std::span<const double> values) {
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return values[static_cast<size_t>(a)] < values[static_cast<size_t>(b)];
  });
  return order;
}

std::vector<std::vector<int>> Chunk(const std::vector<int>& order, int size) {
  std::vector<std::vector<int>> chunks;
  for (size_t start = 0; start < order.size(); start += static_cast<size_t>(size)) {
    chunks.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                        order.begin() + static_cast<std::ptrdiff_t>(start + static_cast<size_t>(size)));
  }
  return chunks;
}

// Lloyd's algorithm with remembered nearest-centroid lists, followed by the
// capacity-constrained assignment and swap pass.
class BalancedKMeans {
 public:
  BalancedKMeans(const MatrixXd& features, int k, const KMeansOptions& options)
      : points_(features),
        n_(static_cast<int>(features.rows())),
        k_(k),
        m_(n_ / k),
        options_(options) {
    num_candidates_ = std::clamp(options.candidates, 2, std::max(2, m_));
    num_candidates_ = std::min(num_candidates_, m_);
    point_norm2_ = points_.rowwise().squaredNorm();
    candidates_.assign(static_cast<size_t>(n_) * num_candidates_, 0);
    candidate_d2_.assign(static_cast<size_t>(n_) * num_candidates_, 0.0);
    radius_.assign(static_cast<size_t>(n_), kInf);
    drift_base_.assign(static_cast<size_t>(n_), 0.0);
  }

  std::vector<std::vector<int>> Run(Rng& rng) {
    SeedFarthestPoint(rng);
    std::vector<int> all(static_cast<size_t>(n_));
    std::iota(all.begin(), all.end(), 0);
    RescanPoints(all);
    double objective = SortCandidatesAndScore();
    for (int it = 0; it < options_.max_iterations; ++it) {
      UpdateCenters();
      const double next = AssignStep();
      const bool converged = objective - next <= options_.tolerance * next;
      objective = next;
      if (converged) break;
    }
    std::vector<std::vector<int>> bags = CapacityAssign();
    SwapRefine(bags);
    return bags;
  }

 private:
  int* Candidates(int i) {
    return candidates_.data() + static_cast<size_t>(i) * num_candidates_;
  }
  double* CandidateD2(int i) {
    return candidate_d2_.data() + static_cast<size_t>(i) * num_candidates_;
  }
  double Dist2(int i, int c) const {
    return (points_.row(i) - centers_.row(c)).squaredNorm();
  }

  void SeedFarthestPoint(Rng& rng) {
    centers_.resize(m_, points_.cols());
    std::vector<double> min_d2(static_cast<size_t>(n_));
    std::vector<std::vector<int>> members(static_cast<size_t>(m_));
    std::vector<double> radius2(static_cast<size_t>(m_), 0.0);

    const int first = rng.UniformInt(n_);
    centers_.row(0) = points_.row(first);
    members[0].resize(static_cast<size_t>(n_));
    std::iota(members[0].begin(), members[0].end(), 0);
    for (int i = 0; i < n_; ++i) {
      min_d2[static_cast<size_t>(i)] = Dist2(i, 0);
      radius2[0] = std::max(radius2[0], min_d2[static_cast<size_t>(i)]);
    }

    std::vector<int> kept;
    for (int c = 1; c < m_; ++c) {
      const int owner = static_cast<int>(
          std::max_element(radius2.begin(), radius2.begin() + c) - radius2.begin());
      int farthest = members[static_cast<size_t>(owner)].front();
      for (const int i : members[static_cast<size_t>(owner)]) {
        if (min_d2[static_cast<size_t>(i)] > min_d2[static_cast<size_t>(farthest)]) {
          farthest = i;
        }
      }
      centers_.row(c) = points_.row(farthest);
      auto& mine = members[static_cast<size_t>(c)];
      for (int a = 0; a < c; ++a) {
        // Points of `a` lie within radius(a) of its center; none can move
        // when the new center is at least 2 radius(a) away.
        const double between = (centers_.row(a) - centers_.row(c)).squaredNorm();
        if (between >= 4.0 * radius2[static_cast<size_t>(a)]) continue;
        kept.clear();
        double r2 = 0.0;
        for (const int i : members[static_cast<size_t>(a)]) {
          const double d2 = Dist2(i, c);
          if (d2 < min_d2[static_cast<size_t>(i)]) {
            min_d2[static_cast<size_t>(i)] = d2;
            mine.push_back(i);
          } else {
            kept.push_back(i);
            r2 = std::max(r2, min_d2[static_cast<size_t>(i)]);
          }
        }
        members[static_cast<size_t>(a)].swap(kept);
        radius2[static_cast<size_t>(a)] = r2;
      }
      std::sort(mine.begin(), mine.end());
      double r2 = 0.0;
      for (const int i : mine) r2 = std::max(r2, min_d2[static_cast<size_t>(i)]);
      radius2[static_cast<size_t>(c)] = r2;
    }
  }

  // Rebuilds the candidate lists of `points` against every centroid.
  void RescanPoints(const std::vector<int>& points) {
    constexpr int kBlock = 256;
    const Eigen::RowVectorXd center_norm2 = centers_.rowwise().squaredNorm().transpose();
    const double max_center_norm2 = center_norm2.maxCoeff();
    const bool bounded = num_candidates_ < m_;
    // Keeps the num_candidates_ + 1 smallest as a max-heap; the extra entry
    // bounds the distance to every non-candidate.
    const size_t keep = static_cast<size_t>(num_candidates_) + (bounded ? 1 : 0);
    RowMatrix block;
    RowMatrix dist;
    std::vector<std::pair<double, int>> heap;
    heap.reserve(keep + 1);
    for (size_t start = 0; start < points.size(); start += kBlock) {
      const int rows =
          static_cast<int>(std::min<size_t>(kBlock, points.size() - start));
      block.resize(rows, points_.cols());
      for (int r = 0; r < rows; ++r) {
        block.row(r) = points_.row(points[start + static_cast<size_t>(r)]);
      }
      dist.noalias() = -2.0 * block * centers_.transpose();
      dist.rowwise() += center_norm2;
      for (int r = 0; r < rows; ++r) {
        const int i = points[start + static_cast<size_t>(r)];
        const double* row = dist.row(r).data();
        heap.clear();
        for (int c = 0; c < m_; ++c) {
          const double d2 = row[c];
          if (heap.size() < keep) {
            heap.emplace_back(d2, c);
            std::push_heap(heap.begin(), heap.end());
          } else if (std::make_pair(d2, c) < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = {d2, c};
            std::push_heap(heap.begin(), heap.end());
          }
        }
        std::sort_heap(heap.begin(), heap.end());
        if (bounded) {
          // Slack for rounding in the expanded distance.
          const double slack = 1e-9 * (point_norm2_[i] + max_center_norm2);
          const double next = point_norm2_[i] + heap.back().first - slack;
          radius_[static_cast<size_t>(i)] = std::sqrt(std::max(0.0, next));
        } else {
          radius_[static_cast<size_t>(i)] = kInf;
        }
        int* cand = Candidates(i);
        for (int j = 0; j < num_candidates_; ++j) {
          cand[j] = heap[static_cast<size_t>(j)].second;
        }
        drift_base_[static_cast<size_t>(i)] = drift_total_;
      }
    }
  }

  // Exact distances to each candidate, sorted ascending; returns the sum of
  // nearest distances.
  double SortCandidatesAndScore() {
    double objective = 0.0;
    std::vector<std::pair<double, int>> local(static_cast<size_t>(num_candidates_));
    for (int i = 0; i < n_; ++i) {
      int* cand = Candidates(i);
      double* cand_d2 = CandidateD2(i);
      for (int j = 0; j < num_candidates_; ++j) {
        local[static_cast<size_t>(j)] = {Dist2(i, cand[j]), cand[j]};
      }
      std::sort(local.begin(), local.end());
      for (int j = 0; j < num_candidates_; ++j) {
        cand_d2[j] = local[static_cast<size_t>(j)].first;
        cand[j] = local[static_cast<size_t>(j)].second;
      }
      objective += cand_d2[0];
    }
    return objective;
  }

  double AssignStep() {
    std::vector<int> rescan;
    for (int i = 0; i < n_; ++i) {
      const int* cand = Candidates(i);
      double best = kInf;
      for (int j = 0; j < num_candidates_; ++j) best = std::min(best, Dist2(i, cand[j]));
      // Every other centroid was at least radius away at the last rescan and
      // has since moved by at most the accumulated drift.
      const double floor = radius_[static_cast<size_t>(i)] -
                           (drift_total_ - drift_base_[static_cast<size_t>(i)]);
      if (!(std::sqrt(best) <= floor)) rescan.push_back(i);
    }
    if (!rescan.empty()) RescanPoints(rescan);
    return SortCandidatesAndScore();
  }

  void UpdateCenters() {
    RowMatrix sums = RowMatrix::Zero(m_, points_.cols());
    std::vector<int> counts(static_cast<size_t>(m_), 0);
    for (int i = 0; i < n_; ++i) {
      const int c = Candidates(i)[0];
      sums.row(c) += points_.row(i);
      ++counts[static_cast<size_t>(c)];
    }
    double max_drift = 0.0;
    for (int c = 0; c < m_; ++c) {
      if (counts[static_cast<size_t>(c)] == 0) continue;  // keep empty centroid
      const Eigen::RowVectorXd next = sums.row(c) / counts[static_cast<size_t>(c)];
      max_drift = std::max(max_drift, (next - centers_.row(c)).norm());
      centers_.row(c) = next;
    }
    // Rounding guard on the triangle-inequality bound.
    drift_total_ += max_drift * (1.0 + 1e-12) + 1e-300;
  }

  std::vector<std::vector<int>> CapacityAssign() {
    std::vector<int> order(static_cast<size_t>(n_));
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> margin(static_cast<size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      const double* d2 = CandidateD2(i);
      margin[static_cast<size_t>(i)] = num_candidates_ > 1 ? d2[1] - d2[0] : kInf;
    }
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return margin[static_cast<size_t>(a)] > margin[static_cast<size_t>(b)];
    });

    std::vector<int> room(static_cast<size_t>(m_), k_);
    std::vector<std::vector<int>> bags(static_cast<size_t>(m_));
    for (const int i : order) {
      int chosen = -1;
      const int* cand = Candidates(i);
      for (int j = 0; j < num_candidates_ && chosen < 0; ++j) {
        if (room[static_cast<size_t>(cand[j])] > 0) chosen = cand[j];
      }
      if (chosen < 0) {
        double best = kInf;
        for (int c = 0; c < m_; ++c) {
          if (room[static_cast<size_t>(c)] == 0) continue;
          const double d2 = Dist2(i, c);
          if (d2 < best) {
            best = d2;
            chosen = c;
          }
        }
      }
      --room[static_cast<size_t>(chosen)];
      bags[static_cast<size_t>(chosen)].push_back(i);
    }
    return bags;
  }

  void SwapRefine(std::vector<std::vector<int>>& bags) {
    RowMatrix means(m_, points_.cols());
    std::vector<int> bag_of(static_cast<size_t>(n_));
    for (int l = 0; l < m_; ++l) {
      means.row(l).setZero();
      for (const int i : bags[static_cast<size_t>(l)]) {
        means.row(l) += points_.row(i);
        bag_of[static_cast<size_t>(i)] = l;
      }
      means.row(l) /= k_;
    }
    auto d2 = [&](int i, int l) {
      return (points_.row(i) - means.row(l)).squaredNorm();
    };
    for (int i = 0; i < n_; ++i) {
      const int own = bag_of[static_cast<size_t>(i)];
      const double here = d2(i, own);
      const int* cand = Candidates(i);
      double best_gain = 0.0;
      int best_bag = -1;
      size_t best_slot = 0;
      for (int j = 0; j < num_candidates_; ++j) {
        const int other = cand[j];
        if (other == own) continue;
        const double there = d2(i, other);
        if (there >= here) continue;
        const auto& members = bags[static_cast<size_t>(other)];
        for (size_t s = 0; s < members.size(); ++s) {
          const int partner = members[s];
          const double gain = here + d2(partner, other) - there - d2(partner, own);
          if (gain > best_gain) {
            best_gain = gain;
            best_bag = other;
            best_slot = s;
          }
        }
      }
      if (best_bag < 0 || best_gain <= 1e-12 * (here + 1e-300)) continue;
      auto& theirs = bags[static_cast<size_t>(best_bag)];
      auto& ours = bags[static_cast<size_t>(own)];
      const int partner = theirs[best_slot];
      theirs[best_slot] = i;
      *std::find(ours.begin(), ours.end(), i) = partner;
      bag_of[static_cast<size_t>(i)] = best_bag;
      bag_of[static_cast<size_t>(partner)] = own;
    }
  }

  const RowMatrix points_;
  const int n_;
  const int k_;
  const int m_;
  const KMeansOptions options_;
  int num_candidates_ = 0;
  VectorXd point_norm2_;
  RowMatrix centers_;
  std::vector<int> candidates_;
  std::vector<double> candidate_d2_;
  std::vector<double> radius_;
  std::vector<double> drift_base_;
  double drift_total_ = 0.0;
};

absl::StatusOr<SubsetBagging> SuperBagsFromOrder(const std::vector<int>& order,
                                                 int k, Rng& rng) {
  const int n = static_cast<int>(order.size());
  SubsetBagging out{.instances = {},
                    .bagging = *Bagging::FromAssignment(std::vector<int>{0}, 1),
                    .unused = {},
                    .superbags = Chunk(order, 2 * k),
                    .complement_bags = {}};
  std::vector<std::vector<int>> chosen_bags;
  for (auto& group : out.superbags) {
    std::sort(group.begin(), group.end());
    const std::vector<int> picks = rng.Subset(2 * k, k);
    std::vector<int> chosen;
    std::vector<int> rest;
    size_t next = 0;
    for (int p = 0; p < 2 * k; ++p) {
      if (next < picks.size() && picks[next] == p) {
        chosen.push_back(group[static_cast<size_t>(p)]);
        ++next;
      } else {
        rest.push_back(group[static_cast<size_t>(p)]);
      }
    }
    chosen_bags.push_back(std::move(chosen));
    out.complement_bags.push_back(std::move(rest));
  }
  for (const auto& bag : chosen_bags) {
    out.instances.insert(out.instances.end(), bag.begin(), bag.end());
  }
  std::sort(out.instances.begin(), out.instances.end());
  for (const auto& bag : out.complement_bags) {
    out.unused.insert(out.unused.end(), bag.begin(), bag.end());
  }
  std::sort(out.unused.begin(), out.unused.end());

  std::vector<int> position(static_cast<size_t>(n), -1);
  for (size_t p = 0; p < out.instances.size(); ++p) {
    position[static_cast<size_t>(out.instances[p])] = static_cast<int>(p);
  }
  for (auto& bag : chosen_bags) {
    for (int& i : bag) i = position[static_cast<size_t>(i)];
  }
  absl::StatusOr<Bagging> local = Bagging::FromBags(
      std::move(chosen_bags), static_cast<int>(out.instances.size()), k);
  if (!local.ok()) return local.status();
  out.bagging = *std::move(local);
  return out;
}

}  // namespace

absl::StatusOr<Bagging> LabelKMeansEqual(std::span<const double> values, int k) {
  const int n = static_cast<int>(values.size());
  if (absl::Status status = CheckDivisible(n, k); !status.ok()) return status;
  return Bagging::FromBags(Chunk(StableOrder(values), k), n, k);
}

absl::StatusOr<Bagging> LabelKMeansMinSize(std::span<const double> values,
                                           int k) {
  const int n = static_cast<int>(values.size());
  if (k < 1) return absl::InvalidArgumentError("k must be positive");
  if (n < k) {
    return absl::InvalidArgumentError(
        absl::StrCat("TooFewPoints: n=", n, " < k=", k));
  }
  const std::vector<int> order = StableOrder(values);
  // Prefix sums of centered values keep the segment costs well conditioned.
  double center = 0.0;
  for (const double v : values) center += v;
  center /= n;
  std::vector<double> sum(static_cast<size_t>(n) + 1, 0.0);
  std::vector<double> sum_sq(static_cast<size_t>(n) + 1, 0.0);
  for (int p = 0; p < n; ++p) {
    const double v = values[static_cast<size_t>(order[static_cast<size_t>(p)])] - center;
    sum[static_cast<size_t>(p) + 1] = sum[static_cast<size_t>(p)] + v;
    sum_sq[static_cast<size_t>(p) + 1] = sum_sq[static_cast<size_t>(p)] + v * v;
  }
  auto cost = [&](int begin, int end) {
    const double s = sum[static_cast<size_t>(end)] - sum[static_cast<size_t>(begin)];
    const double q = sum_sq[static_cast<size_t>(end)] - sum_sq[static_cast<size_t>(begin)];
    return std::max(0.0, q - s * s / (end - begin));
  };
  // best[p]: optimal cost of the first p sorted values; cut[p]: start of the
  // last segment.
  std::vector<double> best(static_cast<size_t>(n) + 1, kInf);
  std::vector<int> cut(static_cast<size_t>(n) + 1, -1);
  best[0] = 0.0;
  for (int end = k; end <= n; ++end) {
    const int longest = (end == n && n < 2 * k) ? n : std::min(end, 2 * k - 1);
    for (int len = k; len <= longest; ++len) {
      const int begin = end - len;
      if (best[static_cast<size_t>(begin)] == kInf) continue;
      const double candidate = best[static_cast<size_t>(begin)] + cost(begin, end);
      if (candidate < best[static_cast<size_t>(end)]) {
        best[static_cast<size_t>(end)] = candidate;
        cut[static_cast<size_t>(end)] = begin;
      }
    }
  }
  std::vector<std::vector<int>> bags;
  for (int end = n; end > 0; end = cut[static_cast<size_t>(end)]) {
    const int begin = cut[static_cast<size_t>(end)];
    bags.emplace_back(order.begin() + begin, order.begin() + end);
  }
  return Bagging::FromBags(std::move(bags), n, k);
}

absl::StatusOr<Bagging> InstanceKMeansBalanced(const MatrixXd& features, int k,
                                               Rng& rng,
                                               const KMeansOptions& options) {
  const int n = static_cast<int>(features.rows());
  if (absl::Status status = CheckDivisible(n, k); !status.ok()) return status;
  if (!features.allFinite()) {
    return absl::InvalidArgumentError("features contain non-finite values");
  }
  const int m = n / k;
  if (m == 1) {
    return Bagging::FromAssignment(std::vector<int>(static_cast<size_t>(n), 0), k);
  }
  if (k == 1) {
    std::vector<int> assignment(static_cast<size_t>(n));
    std::iota(assignment.begin(), assignment.end(), 0);
    return Bagging::FromAssignment(assignment, 1);
  }
  BalancedKMeans solver(features, k, options);
  return Bagging::FromBags(solver.Run(rng), n, k);
}

absl::StatusOr<MatrixXd> WhitenFeatures(const MatrixXd& features,
                                        const MatrixXd& covariance) {
  if (covariance.rows() != features.cols() ||
      covariance.cols() != features.cols()) {
    return absl::InvalidArgumentError("covariance must be d x d");
  }
  absl::StatusOr<MatrixXd> inv_sqrt = InverseSqrtSpd(covariance);
  if (!inv_sqrt.ok()) return inv_sqrt.status();
  // Row form of x -> Sigma^{-1/2} x; the matrix is symmetric.
  return MatrixXd(features * *inv_sqrt);
}

absl::StatusOr<Bagging> ScaledInstanceKMeans(const MatrixXd& features,
                                             const MatrixXd& covariance, int k,
                                             Rng& rng,
                                             const KMeansOptions& options) {
  absl::StatusOr<MatrixXd> whitened = WhitenFeatures(features, covariance);
  if (!whitened.ok()) return whitened.status();
  return InstanceKMeansBalanced(*whitened, k, rng, options);
}

absl::StatusOr<Bagging> RandomBagging(int n, int k, Rng& rng) {
  if (absl::Status status = CheckDivisible(n, k); !status.ok()) return status;
  return Bagging::FromBags(Chunk(rng.Permutation(n), k), n, k);
}

std::vector<std::vector<int>> GlobalBags(const SubsetBagging& subset) {
  std::vector<std::vector<int>> bags;
  for (const auto& local : subset.bagging.bags()) {
    std::vector<int> bag;
    for (const int p : local) bag.push_back(subset.instances[static_cast<size_t>(p)]);
    bags.push_back(std::move(bag));
  }
  return bags;
}

SubsetBagging WholeDataBagging(Bagging bagging) {
  std::vector<int> instances(static_cast<size_t>(bagging.num_instances()));
  std::iota(instances.begin(), instances.end(), 0);
  return SubsetBagging{.instances = std::move(instances),
                       .bagging = std::move(bagging),
                       .unused = {},
                       .superbags = {},
                       .complement_bags = {}};
}

absl::StatusOr<SubsetBagging> SuperBagRandom(int n, int k, Rng& rng) {
  if (k < 1) return absl::InvalidArgumentError("k must be positive");
  if (absl::Status status = CheckDivisible(n, 2 * k); !status.ok()) return status;
  return SuperBagsFromOrder(rng.Permutation(n), k, rng);
}

absl::StatusOr<SubsetBagging> SuperBagSortedAggMir(std::span<const double> values,
                                                   int k, Rng& rng) {
  const int n = static_cast<int>(values.size());
  if (k < 1) return absl::InvalidArgumentError("k must be positive");
  if (absl::Status status = CheckDivisible(n, 2 * k); !status.ok()) return status;
  return SuperBagsFromOrder(StableOrder(values), k, rng);
}

std::string_view BaggingMethodName(BaggingMethod method) {
  switch (method) {
    case BaggingMethod::kInstanceKMeans:
      return "instance-kmeans";
    case BaggingMethod::kScaledInstanceKMeans:
      return "scaled-instance-kmeans";
    case BaggingMethod::kLabelKMeans:
      return "label-kmeans";
    case BaggingMethod::kRandom:
      return "random";
    case BaggingMethod::kSuperBagRandom:
      return "superbag-random";
    case BaggingMethod::kSuperBagSorted:
      return "superbag-sorted";
  }
  return "unknown";
}

absl::StatusOr<BaggingMethod> ParseBaggingMethod(std::string_view name) {
  for (const BaggingMethod method :
       {BaggingMethod::kInstanceKMeans, BaggingMethod::kScaledInstanceKMeans,
        BaggingMethod::kLabelKMeans, BaggingMethod::kRandom,
        BaggingMethod::kSuperBagRandom, BaggingMethod::kSuperBagSorted}) {
    if (name == BaggingMethodName(method)) return method;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown bagging method '", std::string(name), "'"));
}

bool IsLabelDependent(BaggingMethod method) {
  return method == BaggingMethod::kLabelKMeans ||
         method == BaggingMethod::kSuperBagSorted;
}

absl::StatusOr<SubsetBagging> BuildBagging(BaggingMethod method,
                                           const MatrixXd& features,
                                           const VectorXd& labels,
                                           const BaggingRequest& request,
                                           Rng& rng) {
  const int n = static_cast<int>(features.rows());
  const std::span<const double> label_span(labels.data(),
                                           static_cast<size_t>(labels.size()));
  absl::StatusOr<Bagging> bagging = absl::InternalError("unset");
  switch (method) {
    case BaggingMethod::kInstanceKMeans:
      bagging = InstanceKMeansBalanced(features, request.k, rng, request.kmeans);
      break;
    case BaggingMethod::kScaledInstanceKMeans:
      if (request.covariance == nullptr) {
        return absl::InvalidArgumentError(
            "scaled-instance-kmeans needs the feature covariance");
      }
      bagging = ScaledInstanceKMeans(features, *request.covariance, request.k,
                                     rng, request.kmeans);
      break;
    case BaggingMethod::kLabelKMeans:
      bagging = request.min_size ? LabelKMeansMinSize(label_span, request.k)
                                 : LabelKMeansEqual(label_span, request.k);
      break;
    case BaggingMethod::kRandom:
      bagging = RandomBagging(n, request.k, rng);
      break;
    case BaggingMethod::kSuperBagRandom:
      return SuperBagRandom(n, request.k, rng);
    case BaggingMethod::kSuperBagSorted:
      return SuperBagSortedAggMir(label_span, request.k, rng);
  }
  if (!bagging.ok()) return bagging.status();
  return WholeDataBagging(*std::move(bagging));
}

}  // namespace optbag
