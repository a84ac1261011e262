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

#ifndef OPTBAG_RNG_H_
#define OPTBAG_RNG_H_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace optbag {

// Version tag of the sampling scheme below. Bump whenever any sampler changes
// the stream it produces for a given seed.
inline constexpr int kRngVersion = 1;

// Seeded random source used everywhere in the library.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The standard distributions are implementation-defined, so the
// Gaussian and bounded-integer samplers are implemented here:
//   - Uniform01 uses the top 53 bits of one engine draw.
//   - Gaussian uses the Box-Muller transform and caches the second variate.
//   - UniformInt uses rejection sampling on 64-bit draws.
// Identical seeds therefore give identical streams on every conforming
// platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1).
  double Uniform01();

  // Uniform on [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }

  double Gaussian();
  double Gaussian(double mean, double stddev) {
    return mean + stddev * Gaussian();
  }

  // Uniform on {0, ..., n - 1}. Requires n >= 1.
  int UniformInt(int n);

  // Fisher-Yates shuffle.
  template <typename T>
  void Shuffle(std::span<T> values) {
    for (size_t i = values.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(UniformInt(static_cast<int>(i)));
      std::swap(values[i - 1], values[j]);
    }
  }

  // Uniformly random permutation of {0, ..., n - 1}.
  std::vector<int> Permutation(int n);

  // Uniformly random size-`count` subset of {0, ..., n - 1}, ascending.
  std::vector<int> Subset(int n, int count);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// SplitMix64 finalizer applied to (base, tag). Used to derive independent
// sub-stream seeds without sharing generator state.
uint64_t DeriveSeed(uint64_t base, uint64_t tag);

// FNV-1a over the bytes of `text`.
uint64_t HashString(std::string_view text);

}  // namespace optbag

#endif  // OPTBAG_RNG_H_
