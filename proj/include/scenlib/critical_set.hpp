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

#ifndef SCENLIB__CRITICAL_SET_HPP_
#define SCENLIB__CRITICAL_SET_HPP_

#include "scenlib/errors.hpp"
#include "scenlib/scenario_space.hpp"

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

namespace scenlib
{

/// Exhaustive critical set {x : V(x) > gamma}.
inline std::vector<bool> exact_library(std::span<const double> criticality, double gamma)
{
  std::vector<bool> mask(criticality.size(), false);
  for (std::size_t i = 0; i < criticality.size(); ++i) {
    mask[i] = criticality[i] > gamma;
  }
  return mask;
}

/// Connected components of a cell mask.
struct ComponentLabels
{
  std::vector<int> label;  // -1 outside the mask, else component id
  std::size_t count{0};
};

inline ComponentLabels label_components(
  const ScenarioGrid & grid, const std::vector<bool> & mask, Connectivity connectivity)
{
  if (mask.size() != grid.total_cells()) {
    throw GridMismatch("mask size does not match grid");
  }
  ComponentLabels out{std::vector<int>(mask.size(), -1), 0};
  std::deque<std::size_t> queue;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (!mask[start] || out.label[start] >= 0) {
      continue;
    }
    const int id = static_cast<int>(out.count++);
    out.label[start] = id;
    queue.push_back(start);
    while (!queue.empty()) {
      const std::size_t cell = queue.front();
      queue.pop_front();
      for (std::size_t nb : neighbors_flat(grid, cell, connectivity)) {
        if (mask[nb] && out.label[nb] < 0) {
          out.label[nb] = id;
          queue.push_back(nb);
        }
      }
    }
  }
  return out;
}

}  // namespace scenlib

#endif  // SCENLIB__CRITICAL_SET_HPP_
