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

#ifndef SCENLIB__NUMERIC_HPP_
#define SCENLIB__NUMERIC_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>

namespace scenlib
{

/// Neumaier-compensated accumulator. Results depend only on the order of add() calls.
class CompensatedSum
{
public:
  void add(double x) noexcept
  {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const noexcept { return sum_ + compensation_; }

private:
  double sum_{0.0};
  double compensation_{0.0};
};

inline double compensated_sum(std::span<const double> values) noexcept
{
  CompensatedSum acc;
  for (double v : values) {
    acc.add(v);
  }
  return acc.value();
}

// 64-bit FNV-1a, used for config/library fingerprints in reports.
inline std::uint64_t fnv1a64(std::string_view bytes) noexcept
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace scenlib

#endif  // SCENLIB__NUMERIC_HPP_
