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

#include <map>
#include <span>
#include <string>
#include <utility>

#include "benchmark/benchmark.h"
#include "optbag/bagging.h"
#include "optbag/estimators.h"
#include "optbag/rng.h"
#include "optbag/synth.h"

namespace optbag {
namespace {

const SyntheticData& Data(int n, int d) {
  static auto* cache = new std::map<std::pair<int, int>, SyntheticData>();
  auto it = cache->find({n, d});
  if (it == cache->end()) {
    DataSpec spec;
    spec.n = n;
    spec.d = d;
    spec.seed = 1;
    it = cache->emplace(std::make_pair(n, d), *GenerateSyntheticData(spec)).first;
  }
  return it->second;
}

void BM_LabelKMeansEqual(benchmark::State& state) {
  const Dataset& data = Data(static_cast<int>(state.range(0)), 4).dataset;
  const std::span<const double> labels(data.labels.data(), data.labels.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(LabelKMeansEqual(labels, static_cast<int>(state.range(1))));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LabelKMeansEqual)->Args({5000, 10})->Args({50000, 10})->Args({50000, 50});

void BM_LabelKMeansMinSize(benchmark::State& state) {
  const Dataset& data = Data(static_cast<int>(state.range(0)), 4).dataset;
  const std::span<const double> labels(data.labels.data(), data.labels.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(LabelKMeansMinSize(labels, static_cast<int>(state.range(1))));
  }
}
BENCHMARK(BM_LabelKMeansMinSize)->Args({2000, 10})->Args({20000, 10});

void BM_InstanceKMeansBalanced(benchmark::State& state) {
  const Dataset& data = Data(static_cast<int>(state.range(0)), 32).dataset;
  Rng rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        InstanceKMeansBalanced(data.features, static_cast<int>(state.range(1)), rng));
  }
}
BENCHMARK(BM_InstanceKMeansBalanced)
    ->Args({5000, 10})
    ->Args({50000, 10})
    ->Args({50000, 50})
    ->Unit(benchmark::kMillisecond);

void BM_Fit(benchmark::State& state) {
  const LossKind loss = static_cast<LossKind>(state.range(0));
  const Dataset& data = Data(50000, 32).dataset;
  Rng rng(4);
  const Bagging bagging = *RandomBagging(data.n(), 10, rng);
  const AggregateLabels labels =
      MakeBagLabels(data.labels, bagging, AggregationFor(loss), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(FitLoss(loss, data.features, bagging, labels));
  }
  state.SetLabel(std::string(LossKindName(loss)));
}
BENCHMARK(BM_Fit)
    ->Arg(static_cast<int>(LossKind::kInstanceMir))
    ->Arg(static_cast<int>(LossKind::kBagLlp))
    ->Arg(static_cast<int>(LossKind::kAggMir))
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace optbag

BENCHMARK_MAIN();
