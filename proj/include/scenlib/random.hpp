// Copyright 2026 The scenlib Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SCENLIB__RANDOM_HPP_
#define SCENLIB__RANDOM_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace scenlib
{

// All randomness goes through SplitMix64 (Steele, Lea & Flood 2014), a
// counter-based generator: output k of a stream is mix64(seed + k * golden).
// The distributions below are written out explicitly instead of using the
// <random> distributions, whose outputs are implementation-defined, so a
// seed reproduces the same draws on every platform.

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of sub-stream `stream` under `base`. Used for per-cell, per-replication
/// and per-draw streams so results never depend on evaluation order.
inline constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept
{
  return mix64(mix64(base + kGoldenGamma) ^ (stream * kGoldenGamma + 0x632be59bd9b4e019ULL));
}

inline constexpr std::uint64_t derive_seed(
  std::uint64_t base, std::uint64_t stream, std::uint64_t sub) noexcept
{
  return derive_seed(derive_seed(base, stream), sub);
}

/// Named sub-streams of the experiment seed.
namespace stream
{
inline constexpr std::uint64_t kNdd = 1;
inline constexpr std::uint64_t kSurrogateField = 2;
inline constexpr std::uint64_t kSearch = 3;
inline constexpr std::uint64_t kEvaluation = 4;
inline constexpr std::uint64_t kCrude = 5;
inline constexpr std::uint64_t kCavField = 6;
}  // namespace stream

class SplitMix64
{
public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept
  {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n) by rejection; n > 0.
  std::uint64_t uniform_index(std::uint64_t n) noexcept
  {
    const std::uint64_t limit = max() - (max() % n);
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal draw via Box-Muller (cosine branch only).
  double normal() noexcept
  {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double stddev) noexcept { return mean + stddev * normal(); }

private:
  std::uint64_t state_;
};

}  // namespace scenlib

#endif  // SCENLIB__RANDOM_HPP_
