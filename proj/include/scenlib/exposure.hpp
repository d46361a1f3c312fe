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

#ifndef SCENLIB__EXPOSURE_HPP_
#define SCENLIB__EXPOSURE_HPP_

#include "scenlib/errors.hpp"
#include "scenlib/numeric.hpp"
#include "scenlib/random.hpp"
#include "scenlib/scenario_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace scenlib
{

using Sample = std::vector<double>;

inline constexpr double kDefaultZoneMassTarget = 0.95;

/// Discrete on-road occurrence distribution over the grid plus its
/// high-exposure zone.
struct ExposureModel
{
  ScenarioGrid grid;
  std::vector<double> mass;       // one probability per cell, flat order
  std::vector<bool> zone_mask;    // membership in the high-exposure zone
  double zone_mass_target{kDefaultZoneMassTarget};
  std::size_t in_bounds{0};
  std::size_t out_of_bounds{0};

  bool operator==(const ExposureModel &) const = default;
};

/// Greedy highest-density region: cells by descending mass (lower flat index
/// first on ties) until the cumulative mass reaches `mass_target`.
inline std::vector<bool> high_exposure_zone(std::span<const double> mass, double mass_target)
{
  if (!(mass_target > 0.0 && mass_target < 1.0)) {
    throw DomainError("zone mass target must lie in (0, 1)");
  }
  std::vector<std::size_t> order(mass.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return mass[a] > mass[b];
  });

  // A tolerance of a few ulps keeps sums like 95 x 0.01 from falling short.
  constexpr double kSlack = 1e-12;
  std::vector<bool> zone(mass.size(), false);
  CompensatedSum cumulative;
  for (std::size_t cell : order) {
    if (cumulative.value() >= mass_target - kSlack) {
      break;
    }
    zone[cell] = true;
    cumulative.add(mass[cell]);
  }
  return zone;
}

inline std::vector<bool> high_exposure_zone(const ExposureModel & model, double mass_target)
{
  return high_exposure_zone(model.mass, mass_target);
}

/// Bins samples to their nearest cell center. Out-of-bounds samples are
/// counted, not binned.
inline ExposureModel fit_histogram(
  const ScenarioGrid & grid, std::span<const Sample> samples,
  double zone_mass_target = kDefaultZoneMassTarget)
{
  if (samples.empty()) {
    throw EmptyInput("no exposure samples");
  }
  ExposureModel model;
  model.grid = grid;
  model.zone_mass_target = zone_mass_target;
  std::vector<std::uint64_t> counts(grid.total_cells(), 0);
  for (const Sample & s : samples) {
    bool inside = s.size() == grid.dims();
    for (std::size_t d = 0; inside && d < grid.dims(); ++d) {
      inside = s[d] >= grid.axis(d).min && s[d] <= grid.axis(d).max;
    }
    if (!inside) {
      ++model.out_of_bounds;
      continue;
    }
    ++counts[grid.flat(point_to_index(grid, s))];
    ++model.in_bounds;
  }
  if (model.in_bounds == 0) {
    throw EmptyInput("all " + std::to_string(samples.size()) + " exposure samples are out of bounds");
  }
  model.mass.resize(counts.size());
  const double total = static_cast<double>(model.in_bounds);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    model.mass[i] = static_cast<double>(counts[i]) / total;
  }
  model.zone_mask = high_exposure_zone(model.mass, zone_mass_target);
  return model;
}

/// Normalized distance from a scenario to the zone: Euclidean distance in
/// coordinates scaled by each dimension's bound width, minimized over zone
/// cells. Zero for members of the zone.
inline double distance_to_zone(
  const ScenarioGrid & grid, const std::vector<bool> & zone_mask, const ScenarioPoint & point)
{
  if (zone_mask.size() != grid.total_cells()) {
    throw GridMismatch("zone mask size does not match grid");
  }
  if (zone_mask[grid.flat(point.index)]) {
    return 0.0;
  }
  const std::vector<double> u = grid.normalized(point);
  const std::size_t dims = grid.dims();
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t cell = 0; cell < zone_mask.size(); ++cell) {
    if (!zone_mask[cell]) {
      continue;
    }
    any = true;
    double sq = 0.0;
    std::size_t rest = cell;
    for (std::size_t d = 0; d < dims; ++d) {
      const Axis & a = grid.axis(d);
      const std::size_t i = rest / grid.stride(d);
      rest %= grid.stride(d);
      const double v = (a.centers[i] - a.min) / a.width();
      sq += (u[d] - v) * (u[d] - v);
    }
    best = std::min(best, sq);
  }
  if (!any) {
    throw EmptyInput("high-exposure zone is empty");
  }
  return std::sqrt(best);
}

// ---------------------------------------------------------------------------
// Synthetic naturalistic-driving data

struct MixtureComponent
{
  double weight{1.0};
  std::vector<double> mean;
  std::vector<double> stddev;

  bool operator==(const MixtureComponent &) const = default;
};

/// Truncated Gaussian mixture used in place of recorded driving data.
struct NddSpec
{
  std::vector<MixtureComponent> components;
  std::size_t sample_count{200000};
  std::uint64_t seed{0};

  bool operator==(const NddSpec &) const = default;
};

inline void validate(const NddSpec & spec, const ScenarioGrid & grid)
{
  if (spec.components.empty()) {
    throw InvalidConfig("ndd.components must not be empty");
  }
  if (spec.sample_count == 0) {
    throw InvalidConfig("ndd.sample_count must be positive");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < spec.components.size(); ++k) {
    const auto & c = spec.components[k];
    const std::string where = "ndd.components[" + std::to_string(k) + "]";
    if (!(c.weight > 0.0)) {
      throw InvalidConfig(where + ".weight must be positive");
    }
    total += c.weight;
    if (c.mean.size() != grid.dims() || c.stddev.size() != grid.dims()) {
      throw InvalidConfig(where + ": mean/std must have one entry per grid dimension");
    }
    for (std::size_t d = 0; d < grid.dims(); ++d) {
      if (!(c.stddev[d] > 0.0)) {
        throw InvalidConfig(where + ".std must be positive");
      }
      const Axis & a = grid.axis(d);
      const double lo = a.min - 6.0 * c.stddev[d];
      const double hi = a.max + 6.0 * c.stddev[d];
      if (c.mean[d] < lo || c.mean[d] > hi) {
        throw InvalidConfig(where + ".mean lies more than 6 standard deviations outside the grid "
                            "bounds in dimension " + std::to_string(d));
      }
    }
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidConfig("ndd component weights must sum to 1");
  }
}

/// Draws `sample_count` points from the mixture truncated to the grid bounds
/// (per-sample rejection). Deterministic for a fixed seed.
inline std::vector<Sample> synthesize_ndd(const NddSpec & spec, const ScenarioGrid & grid)
{
  validate(spec, grid);
  SplitMix64 rng(spec.seed);
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto & c : spec.components) {
    acc += c.weight;
    cumulative.push_back(acc);
  }

  constexpr std::size_t kMaxAttempts = 1'000'000;
  std::vector<Sample> samples;
  samples.reserve(spec.sample_count);
  Sample s(grid.dims());
  for (std::size_t i = 0; i < spec.sample_count; ++i) {
    bool accepted = false;
    for (std::size_t attempt = 0; attempt < kMaxAttempts && !accepted; ++attempt) {
      const double u = rng.uniform() * acc;
      std::size_t k = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
      k = std::min(k, spec.components.size() - 1);
      const auto & c = spec.components[k];
      accepted = true;
      for (std::size_t d = 0; d < grid.dims(); ++d) {
        s[d] = rng.normal(c.mean[d], c.stddev[d]);
        accepted = accepted && s[d] >= grid.axis(d).min && s[d] <= grid.axis(d).max;
      }
    }
    if (!accepted) {
      throw InvalidConfig("ndd rejection sampling stalled; mixture has negligible mass in bounds");
    }
    samples.push_back(s);
  }
  return samples;
}

}  // namespace scenlib

#endif  // SCENLIB__EXPOSURE_HPP_
