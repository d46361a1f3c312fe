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


#ifndef SCENLIB_TESTS__FIXTURES_HPP_
#define SCENLIB_TESTS__FIXTURES_HPP_

#include "scenlib/commands.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace scenlib::testing
{

inline std::filesystem::path source_dir() { return SCENLIB_SOURCE_DIR; }
inline std::filesystem::path default_config_path() { return source_dir() / "configs" / "default.json"; }

inline ScenarioGrid line_grid(std::size_t cells, double lo = 0.0, double hi = 1.0)
{
  const AxisSpec spec{lo, hi, cells};
  return ScenarioGrid(std::span<const AxisSpec>(&spec, 1));
}

inline ScenarioGrid plane_grid(std::size_t rows, std::size_t cols)
{
  const AxisSpec specs[] = {{0.0, 1.0, rows}, {0.0, 1.0, cols}};
  return ScenarioGrid(specs);
}

inline ExposureModel exposure_from_mass(const ScenarioGrid & grid, std::vector<double> mass)
{
  ExposureModel e;
  e.grid = grid;
  e.zone_mask = high_exposure_zone(mass, kDefaultZoneMassTarget);
  e.mass = std::move(mass);
  e.in_bounds = 1;
  return e;
}

// Library with Phi = {V > gamma} built straight from (f, p), no search.
inline Library toy_library(
  const ScenarioGrid & grid, const std::vector<double> & f, const std::vector<double> & p,
  double gamma)
{
  Library lib;
  lib.exposure = exposure_from_mass(grid, p);
  lib.challenge = ChallengeField{grid, f, "toy", 1};
  lib.field = criticality_field(lib.challenge, lib.exposure);
  lib.gamma = gamma;
  lib.members = exact_library(lib.field.value, gamma);
  lib.w = library_weight(lib.field.value, lib.members);
  return lib;
}

// The shipped default experiment, built once per test binary.
struct DefaultSetup
{
  ExperimentConfig config;
  ScenarioGrid grid;
  ExposureModel exposure;
  LibraryResult built;
  ChallengeField cav_field;

  const Library & library() const { return built.library; }
};

inline const DefaultSetup & default_setup()
{
  static const DefaultSetup setup = [] {
    DefaultSetup s;
    s.config = load_config(default_config_path());
    s.grid = build_grid(s.config.odd);
    s.exposure =
      fit_histogram(s.grid, synthesize_ndd(s.config.ndd, s.grid), s.config.zone_mass_target);
    const ChallengeField surrogate =
      exhaustive_field(s.config.surrogate, s.grid, s.config.odd, 1,
                       derive_seed(s.config.seed, stream::kSurrogateField));
    s.built = generate_library(surrogate, s.exposure, s.config.search, s.config.m_factor,
                               s.config.surrogate, s.config.odd);
    s.cav_field = exhaustive_field(s.config.cav, s.grid, s.config.odd, 1,
                                   derive_seed(s.config.seed, stream::kCavField));
    return s;
  }();
  return setup;
}

}  // namespace scenlib::testing

#endif  // SCENLIB_TESTS__FIXTURES_HPP_
