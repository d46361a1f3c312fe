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

#ifndef SCENLIB__DYNAMICS_HPP_
#define SCENLIB__DYNAMICS_HPP_

#include "scenlib/errors.hpp"
#include "scenlib/parallel.hpp"
#include "scenlib/random.hpp"
#include "scenlib/scenario_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace scenlib
{

enum class ModelKind { FullBrake, IdmLike };

inline std::string_view to_string(ModelKind k) noexcept
{
  return k == ModelKind::FullBrake ? "full-brake" : "idm-like";
}

inline ModelKind parse_model_kind(std::string_view s)
{
  if (s == "full-brake") {
    return ModelKind::FullBrake;
  }
  if (s == "idm-like") {
    return ModelKind::IdmLike;
  }
  throw InvalidConfig("model kind must be \"full-brake\" or \"idm-like\", got \"" +
                      std::string(s) + "\"");
}

/// Longitudinal response of the following (ego) vehicle. Serves as both the
/// surrogate model and the vehicle under test.
///
/// full-brake: after the reaction time, brakes at max_decel while the gap is
/// closing and holds speed otherwise.
/// idm-like: after the reaction time, intelligent-driver-model acceleration
/// toward the ODD ego speed with minimum gap desired_gap and time headway
/// time_headway, clipped to [-max_decel, max_accel].
struct VehicleModel
{
  ModelKind kind{ModelKind::FullBrake};
  double reaction_time{1.0};   // s
  double max_decel{6.0};       // m/s^2, positive magnitude
  double desired_gap{2.0};     // m
  double time_headway{1.2};    // s
  double max_accel{1.5};       // m/s^2
  double comfort_decel{3.0};   // m/s^2
  double noise_std{0.0};       // m/s^2, 0 = deterministic

  bool deterministic() const noexcept { return noise_std == 0.0; }

  bool operator==(const VehicleModel &) const = default;
};

inline void validate(const VehicleModel & m, std::string_view where = "model")
{
  const std::string w(where);
  if (!(m.reaction_time >= 0.0)) {
    throw InvalidConfig(w + ".reaction_time must be >= 0");
  }
  if (!(m.max_decel > 0.0)) {
    throw InvalidConfig(w + ".max_decel must be > 0");
  }
  if (!(m.noise_std >= 0.0)) {
    throw InvalidConfig(w + ".noise_std must be >= 0");
  }
  if (m.kind == ModelKind::IdmLike) {
    if (!(m.desired_gap >= 0.0 && m.time_headway >= 0.0)) {
      throw InvalidConfig(w + ": desired_gap and time_headway must be >= 0");
    }
    if (!(m.max_accel > 0.0 && m.comfort_decel > 0.0)) {
      throw InvalidConfig(w + ": max_accel and comfort_decel must be > 0");
    }
  }
}

inline std::string describe(const VehicleModel & m)
{
  std::ostringstream os;
  os.precision(17);
  os << to_string(m.kind) << "(reaction_time=" << m.reaction_time << ",max_decel=" << m.max_decel;
  if (m.kind == ModelKind::IdmLike) {
    os << ",desired_gap=" << m.desired_gap << ",time_headway=" << m.time_headway
       << ",max_accel=" << m.max_accel << ",comfort_decel=" << m.comfort_decel;
  }
  os << ",noise_std=" << m.noise_std << ")";
  return os.str();
}

struct TraceSample
{
  double t;      // s
  double range;  // m
  double range_rate;  // m/s
  double rel_accel;   // m/s^2, lead minus ego

  bool operator==(const TraceSample &) const = default;
};

struct EncounterTrace
{
  std::vector<TraceSample> samples;
  bool event_flag{false};
  std::optional<double> first_event_time;

  bool operator==(const EncounterTrace &) const = default;
};

namespace detail
{

inline double ego_command(
  const VehicleModel & m, double gap, double ego_speed, double lead_speed, double desired_speed)
{
  const double range_rate = lead_speed - ego_speed;
  if (m.kind == ModelKind::FullBrake) {
    return range_rate < 0.0 ? -m.max_decel : 0.0;
  }
  if (gap <= 0.0) {
    return -m.max_decel;
  }
  const double interaction =
    ego_speed * m.time_headway +
    ego_speed * (-range_rate) / (2.0 * std::sqrt(m.max_accel * m.comfort_decel));
  const double s_star = m.desired_gap + std::max(0.0, interaction);
  const double free_term = std::pow(ego_speed / desired_speed, 4.0);
  const double a = m.max_accel * (1.0 - free_term - (s_star / gap) * (s_star / gap));
  return std::clamp(a, -m.max_decel, m.max_accel);
}

}  // namespace detail

/// Cut-in encounter: at t = 0 the lead vehicle sits `R` ahead of the ego
/// (which drives at odd.ego_speed) with range rate `Rdot`, then holds its
/// speed. Explicit Euler at odd.sim_dt until odd.sim_horizon or until the gap
/// falls to odd.event_gap_threshold. Acceleration noise (std noise_std) is
/// applied once the reaction time has elapsed and draws from `seed`.
inline EncounterTrace simulate_encounter(
  const VehicleModel & model, const ScenarioPoint & scenario, const OddConfig & odd,
  std::uint64_t seed)
{
  if (scenario.values.size() != 2) {
    throw OutOfBounds("cut-in scenarios are [range, range_rate]", 0);
  }
  const double dt = odd.sim_dt;
  const auto steps = static_cast<long long>(std::llround(odd.sim_horizon / dt));
  const auto reaction_steps = static_cast<long long>(std::llround(model.reaction_time / dt));

  double gap = scenario.values[0];
  double ego_speed = odd.ego_speed;
  const double lead_speed = odd.ego_speed + scenario.values[1];
  SplitMix64 rng(seed);

  EncounterTrace trace;
  trace.samples.reserve(static_cast<std::size_t>(steps) + 1);
  for (long long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    double accel = 0.0;
    if (k >= reaction_steps) {
      accel = detail::ego_command(model, gap, ego_speed, lead_speed, odd.ego_speed);
      if (model.noise_std > 0.0) {
        accel += model.noise_std * rng.normal();
      }
    }
    if (ego_speed <= 0.0 && accel < 0.0) {
      accel = 0.0;
    }
    const double range_rate = lead_speed - ego_speed;
    trace.samples.push_back({t, gap, range_rate, -accel});
    if (gap <= odd.event_gap_threshold) {
      trace.event_flag = true;
      trace.first_event_time = t;
      break;
    }
    gap += range_rate * dt;
    ego_speed = std::max(0.0, ego_speed + accel * dt);
  }
  return trace;
}

/// Enhanced time-to-collision under constant relative acceleration: the first
/// positive root of R + Rdot t + u_r t^2 / 2 = 0, i.e.
/// (-Rdot - sqrt(Rdot^2 - 2 u_r R)) / u_r. Evaluated in the algebraically
/// equal form 2R / (-Rdot + sqrt(Rdot^2 - 2 u_r R)), which has no
/// cancellation as u_r -> 0. Empty when no positive collision time exists.
inline std::optional<double> ettc(double range, double range_rate, double rel_accel)
{
  if (!(range > 0.0)) {
    throw DomainError("ettc requires a positive range");
  }
  if (std::abs(rel_accel) < 1e-9) {
    if (range_rate < 0.0) {
      return -range / range_rate;
    }
    return std::nullopt;
  }
  const double disc = range_rate * range_rate - 2.0 * rel_accel * range;
  if (disc < 0.0) {
    return std::nullopt;
  }
  const double denom = -range_rate + std::sqrt(disc);
  if (!(denom > 0.0)) {
    return std::nullopt;
  }
  const double t = 2.0 * range / denom;
  if (!(t > 0.0) || !std::isfinite(t)) {
    return std::nullopt;
  }
  return t;
}

inline constexpr double kDefaultEttcNorm = 10.0;  // s

/// Minimal positive ETTC over the trace divided by t_norm, clamped to [0, 1].
/// An event trace scores 0; a trace with no positive ETTC scores 1.
inline double mnp_ettc(const EncounterTrace & trace, double t_norm = kDefaultEttcNorm)
{
  if (!(t_norm > 0.0)) {
    throw DomainError("t_norm must be positive");
  }
  if (trace.event_flag) {
    return 0.0;
  }
  std::optional<double> best;
  for (const TraceSample & s : trace.samples) {
    if (!(s.range > 0.0)) {
      continue;
    }
    if (auto t = ettc(s.range, s.range_rate, s.rel_accel)) {
      best = best ? std::min(*best, *t) : *t;
    }
  }
  if (!best) {
    return 1.0;
  }
  return std::clamp(*best / t_norm, 0.0, 1.0);
}

/// Event probability of `model` in `scenario`: the fraction of replications
/// whose trace contains an event. Replication r simulates with
/// derive_seed(seed, r).
inline double maneuver_challenge(
  const VehicleModel & model, const ScenarioPoint & scenario, const OddConfig & odd,
  std::size_t replications, std::uint64_t seed)
{
  if (replications == 0) {
    throw DomainError("replications must be >= 1");
  }
  if (model.deterministic() && replications != 1) {
    throw DomainError("deterministic models take exactly one replication");
  }
  std::size_t events = 0;
  for (std::size_t r = 0; r < replications; ++r) {
    if (simulate_encounter(model, scenario, odd, derive_seed(seed, r)).event_flag) {
      ++events;
    }
  }
  return static_cast<double>(events) / static_cast<double>(replications);
}

/// Per-cell event probability of a vehicle model (f_S for the surrogate,
/// f_A for the vehicle under test).
struct ChallengeField
{
  ScenarioGrid grid;
  std::vector<double> value;
  std::string model;
  std::size_t replications{1};

  bool operator==(const ChallengeField &) const = default;
};

/// maneuver_challenge on every cell; cell `i` uses derive_seed(seed, i), so
/// values do not depend on evaluation order or thread count.
inline ChallengeField exhaustive_field(
  const VehicleModel & model, const ScenarioGrid & grid, const OddConfig & odd,
  std::size_t replications, std::uint64_t seed, unsigned threads = 1)
{
  validate(model);
  ChallengeField field{grid, std::vector<double>(grid.total_cells(), 0.0), describe(model),
                       replications};
  parallel_for(grid.total_cells(), threads, [&](std::size_t cell) {
    field.value[cell] =
      maneuver_challenge(model, grid.point(cell), odd, replications, derive_seed(seed, cell));
  });
  return field;
}

}  // namespace scenlib

#endif  // SCENLIB__DYNAMICS_HPP_
