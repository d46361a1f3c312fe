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


#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

namespace scenlib
{
namespace
{

using testing::line_grid;

TEST(BuildGrid, DefaultOddHas2501Cells)
{
  const ScenarioGrid g = build_grid(OddConfig{});
  EXPECT_EQ(g.dims(), 2u);
  EXPECT_EQ(g.total_cells(), 2501u);
}

TEST(BuildGrid, SingleCellDimensionRejected)
{
  OddConfig odd;
  odd.range_rate_cells = 1;
  EXPECT_THROW(build_grid(odd), InvalidConfig);
  const AxisSpec one{0.0, 1.0, 1};
  EXPECT_THROW(ScenarioGrid(std::span<const AxisSpec>(&one, 1)), InvalidConfig);
}

TEST(BuildGrid, InvertedBoundsRejected)
{
  OddConfig odd;
  odd.range_min = 90.0;
  odd.range_max = 0.0;
  EXPECT_THROW(build_grid(odd), InvalidConfig);
}

TEST(BuildGrid, MidpointCenters)
{
  const ScenarioGrid g = line_grid(2, 0.0, 10.0);
  ASSERT_EQ(g.axis(0).centers.size(), 2u);
  EXPECT_DOUBLE_EQ(g.axis(0).centers[0], 2.5);
  EXPECT_DOUBLE_EQ(g.axis(0).centers[1], 7.5);
}

TEST(PointToIndex, ExactCenter)
{
  const ScenarioGrid g = line_grid(2, 0.0, 10.0);
  const double c[] = {2.5};
  EXPECT_EQ(point_to_index(g, c), CellIndex{0});
}

TEST(PointToIndex, TieGoesToLowerIndex)
{
  const ScenarioGrid g = line_grid(2, 0.0, 10.0);
  const double c[] = {5.0};
  EXPECT_EQ(point_to_index(g, c), CellIndex{0});
  const double just_above[] = {5.000001};
  EXPECT_EQ(point_to_index(g, just_above), CellIndex{1});
}

TEST(PointToIndex, OutOfBounds)
{
  const ScenarioGrid g = line_grid(2, 0.0, 10.0);
  const double c[] = {11.0};
  EXPECT_THROW(point_to_index(g, c), OutOfBounds);
  const double edges[] = {0.0};
  EXPECT_EQ(point_to_index(g, edges), CellIndex{0});
  const double top[] = {10.0};
  EXPECT_EQ(point_to_index(g, top), CellIndex{1});
}

TEST(PointToIndex, OutOfBoundsNamesDimension)
{
  const ScenarioGrid g = build_grid(OddConfig{});
  const double c[] = {45.0, 12.0};
  try {
    point_to_index(g, c);
    FAIL();
  } catch (const OutOfBounds & e) {
    EXPECT_EQ(e.dimension(), 1u);
  }
}

TEST(PointToIndex, RoundTripsEveryCenter)
{
  const ScenarioGrid g = build_grid(OddConfig{});
  for (std::size_t i = 0; i < g.total_cells(); ++i) {
    const ScenarioPoint p = g.point(i);
    ASSERT_EQ(g.flat(point_to_index(g, p.values)), i);
  }
}

TEST(Grid, FlatIsRowMajorLastDimFastest)
{
  const ScenarioGrid g = testing::plane_grid(3, 4);
  EXPECT_EQ(g.flat({0, 1}), 1u);
  EXPECT_EQ(g.flat({1, 0}), 4u);
  EXPECT_EQ(g.unflatten(7), (CellIndex{1, 3}));
  EXPECT_THROW(g.unflatten(12), OutOfBounds);
  EXPECT_THROW(g.flat({3, 0}), OutOfBounds);
}

TEST(Grid, EnumerationVisitsEveryCellOnce)
{
  const ScenarioGrid g = build_grid(OddConfig{});
  std::set<CellIndex> seen;
  for (std::size_t i = 0; i < g.total_cells(); ++i) {
    seen.insert(g.unflatten(i));
  }
  EXPECT_EQ(seen.size(), g.total_cells());
}

TEST(Neighbors, Counts)
{
  const ScenarioGrid g = testing::plane_grid(5, 5);
  EXPECT_EQ(neighbors(g, {2, 2}, Connectivity::Axis).size(), 4u);
  EXPECT_EQ(neighbors(g, {2, 2}, Connectivity::Full).size(), 8u);
  EXPECT_EQ(neighbors(g, {0, 0}, Connectivity::Full).size(), 3u);
  EXPECT_EQ(neighbors(g, {0, 0}, Connectivity::Axis).size(), 2u);
  EXPECT_EQ(neighbors(g, {0, 2}, Connectivity::Full).size(), 5u);
}

TEST(Neighbors, SymmetricOnRandomGrids)
{
  SplitMix64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t dims = 1 + rng.uniform_index(3);
    std::vector<AxisSpec> specs;
    for (std::size_t d = 0; d < dims; ++d) {
      specs.push_back({0.0, 1.0, 2 + rng.uniform_index(5)});
    }
    const ScenarioGrid g(specs);
    for (Connectivity c : {Connectivity::Axis, Connectivity::Full}) {
      for (std::size_t i = 0; i < g.total_cells(); ++i) {
        const auto ni = neighbors_flat(g, i, c);
        EXPECT_TRUE(std::is_sorted(ni.begin(), ni.end()));
        EXPECT_EQ(std::count(ni.begin(), ni.end(), i), 0);
        for (std::size_t j : ni) {
          const auto nj = neighbors_flat(g, j, c);
          ASSERT_TRUE(std::binary_search(nj.begin(), nj.end(), i))
            << "cell " << i << " -> " << j << " not mirrored";
        }
      }
    }
  }
}

TEST(Connectivity, ParseRoundTrip)
{
  EXPECT_EQ(parse_connectivity("axis"), Connectivity::Axis);
  EXPECT_EQ(parse_connectivity(to_string(Connectivity::Full)), Connectivity::Full);
  EXPECT_THROW(parse_connectivity("diagonal"), InvalidConfig);
}

}  // namespace
}  // namespace scenlib
