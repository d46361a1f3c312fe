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

#ifndef SCENLIB__LIBRARY_HPP_
#define SCENLIB__LIBRARY_HPP_

#include "scenlib/critical_set.hpp"
#include "scenlib/dynamics.hpp"
#include "scenlib/errors.hpp"
#include "scenlib/exposure.hpp"
#include "scenlib/numeric.hpp"
#include "scenlib/parallel.hpp"
#include "scenlib/random.hpp"
#include "scenlib/scenario_space.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace scenlib
{

/// V(x) = f_S(x) p(x) on every cell, with mu_S = sum of V.
struct CriticalityField
{
  ScenarioGrid grid;
  std::vector<double> value;
  double mu_s{0.0};

  bool operator==(const CriticalityField &) const = default;
};

inline CriticalityField criticality_field(
  const ChallengeField & challenge, const ExposureModel & exposure)
{
  if (!(challenge.grid == exposure.grid) || challenge.value.size() != exposure.mass.size()) {
    throw GridMismatch("challenge field and exposure model are on different grids");
  }
  CriticalityField field{challenge.grid, std::vector<double>(challenge.value.size()), 0.0};
  CompensatedSum total;
  for (std::size_t i = 0; i < field.value.size(); ++i) {
    field.value[i] = challenge.value[i] * exposure.mass[i];
    total.add(field.value[i]);
  }
  field.mu_s = total.value();
  return field;
}

/// Relaxed criticality threshold gamma = m mu_S / N(X).
inline double threshold(double m_factor, double mu_s, std::size_t total_cells)
{
  if (!(m_factor >= 1.0)) {
    throw DomainError("m_factor must be >= 1");
  }
  if (!(mu_s >= 0.0)) {
    throw DomainError("mu_S must be >= 0");
  }
  if (total_cells == 0) {
    throw DomainError("grid has no cells");
  }
  return m_factor * mu_s / static_cast<double>(total_cells);
}

struct FixedPointThreshold
{
  double gamma{0.0};
  std::size_t iterations{0};
  bool converged{false};
};

/// Solves gamma = m mu_S / (N(X) - N(Phi(gamma))) by iteration from the relaxed
/// value. Stops at a fixed point, on a repeated gamma (cycle), when Phi would
/// cover the grid, or after max_iterations.
inline FixedPointThreshold fixed_point_threshold(
  const CriticalityField & field, double m_factor, std::size_t max_iterations = 100)
{
  const std::size_t n = field.value.size();
  FixedPointThreshold out{threshold(m_factor, field.mu_s, n), 0, false};
  std::set<double> seen{out.gamma};
  for (std::size_t it = 0; it < max_iterations; ++it) {
    std::size_t members = 0;
    for (double v : field.value) {
      members += v > out.gamma ? 1 : 0;
    }
    if (members >= n) {
      break;
    }
    const double next = m_factor * field.mu_s / static_cast<double>(n - members);
    out.iterations = it + 1;
    if (next == out.gamma) {
      out.converged = true;
      break;
    }
    out.gamma = next;
    if (!seen.insert(next).second) {
      break;
    }
  }
  return out;
}

enum class GammaMode { Relaxed, FixedPoint };

inline std::string_view to_string(GammaMode g) noexcept
{
  return g == GammaMode::Relaxed ? "relaxed" : "fixed-point";
}

inline GammaMode parse_gamma_mode(std::string_view s)
{
  if (s == "relaxed") {
    return GammaMode::Relaxed;
  }
  if (s == "fixed-point") {
    return GammaMode::FixedPoint;
  }
  throw InvalidConfig("gamma_mode must be \"relaxed\" or \"fixed-point\"");
}

struct SearchSettings
{
  std::size_t start_count{100};
  double weight{1.0};
  Connectivity connectivity{Connectivity::Axis};
  std::uint64_t seed{0};
  double ettc_norm{kDefaultEttcNorm};
  GammaMode gamma_mode{GammaMode::Relaxed};

  bool operator==(const SearchSettings &) const = default;
};

inline void validate(const SearchSettings & s)
{
  if (s.start_count < 1) {
    throw InvalidConfig("search.start_count must be >= 1");
  }
  if (!(s.weight >= 0.0)) {
    throw InvalidConfig("search.weight must be >= 0");
  }
  if (!(s.ettc_norm > 0.0)) {
    throw InvalidConfig("search.ettc_norm must be > 0");
  }
}

/// J(x) = mnpETTC(x) + w d(x, Omega) for the surrogate model.
inline double auxiliary_objective(
  const ScenarioPoint & scenario, const VehicleModel & model, const OddConfig & odd,
  const ExposureModel & exposure, double weight, double ettc_norm = kDefaultEttcNorm,
  std::uint64_t seed = 0)
{
  const double challenge = mnp_ettc(simulate_encounter(model, scenario, odd, seed), ettc_norm);
  if (weight == 0.0) {
    return challenge;
  }
  return challenge + weight * distance_to_zone(exposure.grid, exposure.zone_mask, scenario);
}

struct SearchResult
{
  std::vector<std::size_t> starts;     // flat index per start, in draw order
  std::vector<std::size_t> terminals;  // deduplicated, in first-reached order
  std::size_t evaluations{0};          // objective evaluations actually computed
};

/// Multi-start steepest descent on the grid. Each start is drawn uniformly
/// over the cells from settings.seed; from it the search moves to the
/// neighbor with the strictly smallest objective (lower flat index on ties)
/// until no neighbor improves. `objective(flat_index) -> double` must be
/// deterministic. With `memoize` each cell is evaluated at most once; the
/// returned cells do not depend on memoization or thread count.
template <class Objective>
SearchResult multi_start_search(
  const ScenarioGrid & grid, Objective && objective, const SearchSettings & settings,
  bool memoize = true, unsigned threads = 1)
{
  validate(settings);
  SearchResult result;
  SplitMix64 rng(settings.seed);
  result.starts.resize(settings.start_count);
  for (auto & s : result.starts) {
    s = static_cast<std::size_t>(rng.uniform_index(grid.total_cells()));
  }

  std::vector<std::optional<double>> memo(memoize ? grid.total_cells() : 0);
  std::mutex memo_mutex;
  std::atomic<std::size_t> evaluations{0};
  auto evaluate = [&](std::size_t cell) -> double {
    if (memoize) {
      std::lock_guard lock(memo_mutex);
      if (memo[cell]) {
        return *memo[cell];
      }
    }
    const double j = objective(cell);
    ++evaluations;
    if (memoize) {
      // a concurrent duplicate stores the same deterministic value
      std::lock_guard lock(memo_mutex);
      if (!memo[cell]) {
        memo[cell] = j;
      } else {
        --evaluations;
      }
    }
    return j;
  };

  std::vector<std::size_t> ends(settings.start_count);
  parallel_for(settings.start_count, threads, [&](std::size_t k) {
    std::size_t current = result.starts[k];
    double current_j = evaluate(current);
    while (true) {
      std::size_t best = current;
      double best_j = current_j;
      for (std::size_t nb : neighbors_flat(grid, current, settings.connectivity)) {
        const double j = evaluate(nb);
        if (j < best_j) {
          best = nb;
          best_j = j;
        }
      }
      if (best == current) {
        break;
      }
      current = best;
      current_j = best_j;
    }
    ends[k] = current;
  });

  std::vector<bool> seen(grid.total_cells(), false);
  for (std::size_t e : ends) {
    if (!seen[e]) {
      seen[e] = true;
      result.terminals.push_back(e);
    }
  }
  result.evaluations = evaluations.load();
  return result;
}

/// Breadth-first flood from each seed through cells with V > gamma. Seeds
/// failing the predicate contribute nothing.
inline std::vector<bool> seed_fill(
  const ScenarioGrid & grid, std::span<const double> criticality,
  std::span<const std::size_t> seeds, double gamma, Connectivity connectivity)
{
  if (criticality.size() != grid.total_cells()) {
    throw GridMismatch("criticality field size does not match grid");
  }
  std::vector<bool> member(grid.total_cells(), false);
  std::deque<std::size_t> queue;
  for (std::size_t seed : seeds) {
    if (seed >= grid.total_cells()) {
      throw OutOfBounds("seed " + std::to_string(seed) + " outside grid", 0);
    }
    if (member[seed] || !(criticality[seed] > gamma)) {
      continue;
    }
    member[seed] = true;
    queue.push_back(seed);
    while (!queue.empty()) {
      const std::size_t cell = queue.front();
      queue.pop_front();
      for (std::size_t nb : neighbors_flat(grid, cell, connectivity)) {
        if (!member[nb] && criticality[nb] > gamma) {
          member[nb] = true;
          queue.push_back(nb);
        }
      }
    }
  }
  return member;
}

inline std::vector<bool> seed_fill(
  const CriticalityField & field, std::span<const std::size_t> seeds, double gamma,
  Connectivity connectivity)
{
  return seed_fill(field.grid, field.value, seeds, gamma, connectivity);
}

struct Provenance
{
  std::string surrogate;
  std::string exposure;
  SearchSettings search;

  bool operator==(const Provenance &) const = default;
};

/// The generated testing library: members Phi = {V > gamma} reached by the
/// search, with W = sum of V over Phi.
struct Library
{
  ExposureModel exposure;
  ChallengeField challenge;
  CriticalityField field;
  std::vector<bool> members;
  double gamma{0.0};
  double w{0.0};
  double m_factor{1.0};
  Provenance provenance;

  const ScenarioGrid & grid() const noexcept { return field.grid; }

  std::size_t member_count() const noexcept
  {
    std::size_t n = 0;
    for (bool b : members) {
      n += b ? 1 : 0;
    }
    return n;
  }

  bool operator==(const Library &) const = default;
};

inline double library_weight(std::span<const double> criticality, const std::vector<bool> & members)
{
  CompensatedSum w;
  for (std::size_t i = 0; i < criticality.size(); ++i) {
    if (members[i]) {
      w.add(criticality[i]);
    }
  }
  return w.value();
}

/// How the searched library compares with the exhaustive critical set.
struct CompletenessReport
{
  bool oracle_enabled{false};
  std::size_t exhaustive_count{0};
  std::size_t found_count{0};
  std::vector<std::size_t> missed;
  std::size_t components_total{0};
  std::size_t components_found{0};
  std::vector<std::size_t> terminals;
  std::vector<std::size_t> seeds;  // terminals with V > gamma
  std::size_t evaluations{0};
  std::size_t gamma_iterations{0};
  std::vector<std::string> warnings;

  bool operator==(const CompletenessReport &) const = default;
};

struct LibraryResult
{
  Library library;
  CompletenessReport report;
};

struct GenerateOptions
{
  bool oracle{true};
  bool memoize{true};
  unsigned threads{1};
};

/// Threshold, multi-start search on `objective`, V > gamma filter on the
/// descent terminals, then seed-fill.
template <class Objective>
LibraryResult generate_library(
  const ChallengeField & challenge, const ExposureModel & exposure,
  const SearchSettings & settings, double m_factor, Objective && objective,
  const GenerateOptions & options = {})
{
  validate(settings);
  LibraryResult out;
  Library & lib = out.library;
  CompletenessReport & report = out.report;

  lib.exposure = exposure;
  lib.challenge = challenge;
  lib.field = criticality_field(challenge, exposure);
  lib.m_factor = m_factor;
  lib.provenance = {challenge.model,
                    "histogram(in_bounds=" + std::to_string(exposure.in_bounds) +
                      ",out_of_bounds=" + std::to_string(exposure.out_of_bounds) + ")",
                    settings};

  const std::size_t n = lib.field.value.size();
  if (settings.gamma_mode == GammaMode::Relaxed) {
    lib.gamma = threshold(m_factor, lib.field.mu_s, n);
  } else {
    const FixedPointThreshold fp = fixed_point_threshold(lib.field, m_factor);
    lib.gamma = fp.gamma;
    report.gamma_iterations = fp.iterations;
    if (!fp.converged) {
      report.warnings.push_back("fixed-point threshold iteration did not converge");
    }
  }

  lib.members.assign(n, false);
  if (lib.field.mu_s == 0.0) {
    report.warnings.push_back("mu_S is zero: no critical scenarios, library is empty");
  } else {
    const SearchResult search =
      multi_start_search(lib.grid(), objective, settings, options.memoize, options.threads);
    report.terminals = search.terminals;
    report.evaluations = search.evaluations;
    for (std::size_t t : search.terminals) {
      if (lib.field.value[t] > lib.gamma) {
        report.seeds.push_back(t);
      }
    }
    lib.members = seed_fill(lib.field, report.seeds, lib.gamma, settings.connectivity);
    if (report.seeds.empty()) {
      report.warnings.push_back("no descent terminal exceeded gamma: library is empty");
    }
  }
  lib.w = library_weight(lib.field.value, lib.members);
  report.found_count = lib.member_count();

  if (options.oracle) {
    report.oracle_enabled = true;
    const std::vector<bool> exact = exact_library(lib.field.value, lib.gamma);
    const ComponentLabels labels = label_components(lib.grid(), exact, settings.connectivity);
    report.components_total = labels.count;
    std::vector<bool> component_hit(labels.count, false);
    for (std::size_t i = 0; i < n; ++i) {
      if (!exact[i]) {
        continue;
      }
      ++report.exhaustive_count;
      if (lib.members[i]) {
        component_hit[static_cast<std::size_t>(labels.label[i])] = true;
      } else {
        report.missed.push_back(i);
      }
    }
    for (bool hit : component_hit) {
      report.components_found += hit ? 1 : 0;
    }
    if (!report.missed.empty()) {
      report.warnings.push_back(std::to_string(report.missed.size()) +
                                " critical cells missed by the search");
    }
  }
  return out;
}

/// The standard objective: auxiliary_objective of the surrogate on each
/// cell; stochastic surrogates simulate with derive_seed(settings.seed, cell).
inline auto make_auxiliary_objective(
  const VehicleModel & surrogate, const OddConfig & odd, const ExposureModel & exposure,
  const SearchSettings & settings)
{
  return [&surrogate, &odd, &exposure, settings](std::size_t cell) {
    return auxiliary_objective(exposure.grid.point(cell), surrogate, odd, exposure,
                               settings.weight, settings.ettc_norm,
                               derive_seed(settings.seed, cell));
  };
}

inline LibraryResult generate_library(
  const ChallengeField & challenge, const ExposureModel & exposure,
  const SearchSettings & settings, double m_factor, const VehicleModel & surrogate,
  const OddConfig & odd, const GenerateOptions & options = {})
{
  return generate_library(challenge, exposure, settings, m_factor,
                          make_auxiliary_objective(surrogate, odd, exposure, settings), options);
}

}  // namespace scenlib

#endif  // SCENLIB__LIBRARY_HPP_
