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

#ifndef SCENLIB__SCENARIO_SPACE_HPP_
#define SCENLIB__SCENARIO_SPACE_HPP_

#include "scenlib/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scenlib
{

/// Fixed operating-domain parameters of the cut-in encounter: the scenario
/// bounds and their resolution plus the simulation settings shared by every
/// scenario.
struct OddConfig
{
  double range_min{0.0};          // m
  double range_max{90.0};         // m
  double range_rate_min{-20.0};   // m/s
  double range_rate_max{10.0};    // m/s
  std::size_t range_cells{61};
  std::size_t range_rate_cells{41};
  double ego_speed{30.0};         // m/s
  double sim_horizon{15.0};       // s
  double sim_dt{0.05};            // s
  double event_gap_threshold{0.0};  // m

  bool operator==(const OddConfig &) const = default;
};

inline void validate(const OddConfig & odd)
{
  if (!(odd.range_min < odd.range_max)) {
    throw InvalidConfig("odd.range_min must be < odd.range_max");
  }
  if (!(odd.range_rate_min < odd.range_rate_max)) {
    throw InvalidConfig("odd.range_rate_min must be < odd.range_rate_max");
  }
  if (odd.range_cells < 2) {
    throw InvalidConfig("odd.range_cells must be >= 2");
  }
  if (odd.range_rate_cells < 2) {
    throw InvalidConfig("odd.range_rate_cells must be >= 2");
  }
  if (!(odd.sim_dt > 0.0)) {
    throw InvalidConfig("odd.sim_dt must be > 0");
  }
  if (!(odd.sim_horizon >= 10.0 * odd.sim_dt)) {
    throw InvalidConfig("odd.sim_horizon must be >= 10 * odd.sim_dt");
  }
  if (!(odd.ego_speed > 0.0)) {
    throw InvalidConfig("odd.ego_speed must be > 0");
  }
  if (!(odd.event_gap_threshold >= 0.0)) {
    throw InvalidConfig("odd.event_gap_threshold must be >= 0");
  }
}

/// One discretized decision variable: `cells` equal bins over [min, max],
/// represented by their midpoints.
struct Axis
{
  double min{0.0};
  double max{1.0};
  std::size_t cells{2};
  std::vector<double> centers;

  double width() const noexcept { return max - min; }
  double spacing() const noexcept { return width() / static_cast<double>(cells); }

  bool operator==(const Axis &) const = default;
};

struct AxisSpec
{
  double min;
  double max;
  std::size_t cells;
};

using CellIndex = std::vector<std::size_t>;

/// A single scenario: the addressed cell and its physical coordinates.
struct ScenarioPoint
{
  CellIndex index;
  std::vector<double> values;

  bool operator==(const ScenarioPoint &) const = default;
};

enum class Connectivity { Axis, Full };

inline std::string_view to_string(Connectivity c) noexcept
{
  return c == Connectivity::Axis ? "axis" : "full";
}

inline Connectivity parse_connectivity(std::string_view s)
{
  if (s == "axis") {
    return Connectivity::Axis;
  }
  if (s == "full") {
    return Connectivity::Full;
  }
  throw InvalidConfig("connectivity must be \"axis\" or \"full\", got \"" + std::string(s) + "\"");
}

/// Finite uniform grid over the decision variables. Cells are numbered in
/// row-major order (last dimension fastest); that flat order is the canonical
/// order for every per-cell array in the toolkit.
class ScenarioGrid
{
public:
  ScenarioGrid() = default;

  explicit ScenarioGrid(std::span<const AxisSpec> specs)
  {
    if (specs.empty()) {
      throw InvalidConfig("grid needs at least one dimension");
    }
    total_ = 1;
    for (std::size_t d = 0; d < specs.size(); ++d) {
      const auto & s = specs[d];
      const std::string dim = "dimension " + std::to_string(d);
      if (!(s.min < s.max)) {
        throw InvalidConfig(dim + ": min must be < max");
      }
      if (s.cells < 2) {
        throw InvalidConfig(dim + ": cells must be >= 2");
      }
      Axis axis{s.min, s.max, s.cells, {}};
      axis.centers.resize(s.cells);
      const double h = axis.spacing();
      for (std::size_t i = 0; i < s.cells; ++i) {
        axis.centers[i] = s.min + (static_cast<double>(i) + 0.5) * h;
      }
      total_ *= s.cells;
      axes_.push_back(std::move(axis));
    }
    strides_.assign(axes_.size(), 1);
    for (std::size_t d = axes_.size() - 1; d > 0; --d) {
      strides_[d - 1] = strides_[d] * axes_[d].cells;
    }
  }

  std::size_t dims() const noexcept { return axes_.size(); }
  std::size_t total_cells() const noexcept { return total_; }
  const Axis & axis(std::size_t d) const { return axes_.at(d); }
  const std::vector<Axis> & axes() const noexcept { return axes_; }

  bool contains(const CellIndex & index) const noexcept
  {
    if (index.size() != axes_.size()) {
      return false;
    }
    for (std::size_t d = 0; d < axes_.size(); ++d) {
      if (index[d] >= axes_[d].cells) {
        return false;
      }
    }
    return true;
  }

  std::size_t flat(const CellIndex & index) const
  {
    check_index(index);
    std::size_t f = 0;
    for (std::size_t d = 0; d < axes_.size(); ++d) {
      f += index[d] * strides_[d];
    }
    return f;
  }

  CellIndex unflatten(std::size_t flat_index) const
  {
    if (flat_index >= total_) {
      throw OutOfBounds("flat index " + std::to_string(flat_index) + " outside grid", 0);
    }
    CellIndex index(axes_.size());
    for (std::size_t d = 0; d < axes_.size(); ++d) {
      index[d] = flat_index / strides_[d];
      flat_index %= strides_[d];
    }
    return index;
  }

  ScenarioPoint point(const CellIndex & index) const
  {
    check_index(index);
    ScenarioPoint p{index, std::vector<double>(axes_.size())};
    for (std::size_t d = 0; d < axes_.size(); ++d) {
      p.values[d] = axes_[d].centers[index[d]];
    }
    return p;
  }

  ScenarioPoint point(std::size_t flat_index) const { return point(unflatten(flat_index)); }

  /// Coordinates mapped to [0, 1] per dimension by the bound width.
  std::vector<double> normalized(const ScenarioPoint & p) const
  {
    std::vector<double> u(axes_.size());
    for (std::size_t d = 0; d < axes_.size(); ++d) {
      u[d] = (p.values.at(d) - axes_[d].min) / axes_[d].width();
    }
    return u;
  }

  std::size_t stride(std::size_t d) const { return strides_.at(d); }

  void check_index(const CellIndex & index) const
  {
    if (index.size() != axes_.size()) {
      throw OutOfBounds("index has " + std::to_string(index.size()) + " dimensions, grid has " +
                          std::to_string(axes_.size()), 0);
    }
    for (std::size_t d = 0; d < axes_.size(); ++d) {
      if (index[d] >= axes_[d].cells) {
        throw OutOfBounds("index outside grid in dimension " + std::to_string(d), d);
      }
    }
  }

  bool operator==(const ScenarioGrid & other) const { return axes_ == other.axes_; }

private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t total_{0};
};

/// The two-dimensional [range, range rate] grid of the operating domain.
inline ScenarioGrid build_grid(const OddConfig & odd)
{
  validate(odd);
  const AxisSpec specs[] = {
    {odd.range_min, odd.range_max, odd.range_cells},
    {odd.range_rate_min, odd.range_rate_max, odd.range_rate_cells},
  };
  return ScenarioGrid(specs);
}

/// Nearest cell center per dimension; an exact midpoint between two centers
/// resolves to the lower index. Bounds are inclusive.
inline CellIndex point_to_index(const ScenarioGrid & grid, std::span<const double> coords)
{
  if (coords.size() != grid.dims()) {
    throw OutOfBounds("coordinate has wrong dimension count", 0);
  }
  CellIndex index(grid.dims());
  for (std::size_t d = 0; d < grid.dims(); ++d) {
    const Axis & a = grid.axis(d);
    const double c = coords[d];
    if (!(c >= a.min && c <= a.max)) {
      throw OutOfBounds("coordinate " + std::to_string(c) + " outside bounds in dimension " +
                          std::to_string(d), d);
    }
    const double u = (c - a.min) / a.spacing() - 0.5;  // in center-index units
    double nearest = std::ceil(u - 0.5);
    if (nearest < 0.0) {
      nearest = 0.0;
    }
    auto i = static_cast<std::size_t>(nearest);
    if (i >= a.cells) {
      i = a.cells - 1;
    }
    index[d] = i;
  }
  return index;
}

/// Flat-index neighbors. Axis connectivity gives the up to 2d face neighbors,
/// full connectivity the up to 3^d - 1 cells of the surrounding block.
/// Output is in ascending flat order.
inline std::vector<std::size_t> neighbors_flat(
  const ScenarioGrid & grid, std::size_t flat_index, Connectivity connectivity)
{
  const CellIndex center = grid.unflatten(flat_index);
  const std::size_t d = grid.dims();
  std::vector<std::size_t> out;

  if (connectivity == Connectivity::Axis) {
    out.reserve(2 * d);
    for (std::size_t k = 0; k < d; ++k) {
      if (center[k] > 0) {
        out.push_back(flat_index - grid.stride(k));
      }
      if (center[k] + 1 < grid.axis(k).cells) {
        out.push_back(flat_index + grid.stride(k));
      }
    }
  } else {
    // odometer over offsets in {-1, 0, 1}^d
    std::vector<int> offset(d, -1);
    while (true) {
      bool is_zero = true;
      bool inside = true;
      std::size_t f = 0;
      for (std::size_t k = 0; k < d; ++k) {
        const long long v = static_cast<long long>(center[k]) + offset[k];
        if (offset[k] != 0) {
          is_zero = false;
        }
        if (v < 0 || v >= static_cast<long long>(grid.axis(k).cells)) {
          inside = false;
          break;
        }
        f += static_cast<std::size_t>(v) * grid.stride(k);
      }
      if (inside && !is_zero) {
        out.push_back(f);
      }
      std::size_t k = d;
      while (k > 0 && offset[k - 1] == 1) {
        offset[k - 1] = -1;
        --k;
      }
      if (k == 0) {
        break;
      }
      ++offset[k - 1];
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<CellIndex> neighbors(
  const ScenarioGrid & grid, const CellIndex & index, Connectivity connectivity)
{
  grid.check_index(index);
  std::vector<CellIndex> out;
  for (std::size_t f : neighbors_flat(grid, grid.flat(index), connectivity)) {
    out.push_back(grid.unflatten(f));
  }
  return out;
}

}  // namespace scenlib

#endif  // SCENLIB__SCENARIO_SPACE_HPP_
