/*
 * Copyright 2026 The IDG Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Seeded random streams. The engine is std::mt19937_64; the variate
// transforms are written out here so that every platform produces the same
// sequence (the standard distributions are implementation-defined).

#ifndef IDG_RANDOM_H_
#define IDG_RANDOM_H_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace idg {

// splitmix64 finalizer.
constexpr std::uint64_t MixBits(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent substream seed from a root seed and a tuple of
// stream coordinates, e.g. (run seed, point id, query index).
constexpr std::uint64_t DeriveSeed(std::uint64_t root,
                                   std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = MixBits(root);
  for (std::uint64_t p : path) h = MixBits(h ^ MixBits(p + 0x632be59bd9b4e019ULL));
  return h;
}

// Stream tags used with DeriveSeed so that different consumers of one run
// seed never share a substream.
enum class Stream : std::uint64_t {
  kSplit = 1,
  kSyntheticFeatures,
  kSyntheticLabels,
  kRelease,
  kRandomSubset,
  kMonteCarlo,
  kAcquisitionOrder,
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextBits() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double UniformOpen() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound). Lemire's multiply-shift with rejection.
  std::uint64_t UniformInt(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const unsigned __int128 m =
          static_cast<unsigned __int128>(engine_()) * bound;
      if (static_cast<std::uint64_t>(m) >= threshold) {
        return static_cast<std::uint64_t>(m >> 64);
      }
    }
  }

  // Box-Muller; one variate per call, the pair's second half is discarded to
  // keep the stream position independent of call history.
  double Normal() {
    const double u1 = UniformOpen();
    const double u2 = UniformOpen();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Laplace(0, scale) by inverse CDF with u ~ Uniform(-1/2, 1/2).
  double Laplace(double scale) {
    const double u = UniformOpen() - 0.5;
    const double sign = u < 0 ? -1.0 : (u > 0 ? 1.0 : 0.0);
    return -scale * sign * std::log1p(-2.0 * std::abs(u));
  }

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[UniformInt(i)]);
    }
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace idg

#endif  // IDG_RANDOM_H_
