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

#ifndef SCENLIB__EVALUATION_HPP_
#define SCENLIB__EVALUATION_HPP_

#include "scenlib/dynamics.hpp"
#include "scenlib/errors.hpp"
#include "scenlib/exposure.hpp"
#include "scenlib/library.hpp"
#include "scenlib/numeric.hpp"
#include "scenlib/parallel.hpp"
#include "scenlib/random.hpp"
#include "scenlib/scenario_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace scenlib
{

enum class PolicyKind { Greedy, EpsilonGreedy, Crude };

inline std::string_view to_string(PolicyKind k) noexcept
{
  switch (k) {
    case PolicyKind::Greedy:
      return "greedy";
    case PolicyKind::EpsilonGreedy:
      return "epsilon-greedy";
    case PolicyKind::Crude:
      return "crude";
  }
  return "unknown";
}

inline PolicyKind parse_policy_kind(std::string_view s)
{
  if (s == "greedy") {
    return PolicyKind::Greedy;
  }
  if (s == "epsilon-greedy") {
    return PolicyKind::EpsilonGreedy;
  }
  if (s == "crude") {
    return PolicyKind::Crude;
  }
  throw InvalidConfig("policy must be \"greedy\", \"epsilon-greedy\" or \"crude\"");
}

/// Testing distribution q over the grid (the importance function).
struct SamplingPolicy
{
  ScenarioGrid grid;
  std::vector<double> q;
  PolicyKind kind{PolicyKind::Crude};
  double epsilon{0.0};

  bool operator==(const SamplingPolicy &) const = default;
};

inline std::string describe(const SamplingPolicy & p)
{
  std::ostringstream os;
  os.precision(17);
  os << to_string(p.kind);
  if (p.kind == PolicyKind::EpsilonGreedy) {
    os << "(epsilon=" << p.epsilon << ")";
  }
  return os.str();
}

/// q = V / W on the library, 0 elsewhere.
inline SamplingPolicy greedy_policy(const Library & lib)
{
  if (!(lib.w > 0.0)) {
    throw EmptyInput("library is empty (W = 0); no greedy policy exists");
  }
  SamplingPolicy p{lib.grid(), std::vector<double>(lib.field.value.size(), 0.0),
                   PolicyKind::Greedy, 0.0};
  for (std::size_t i = 0; i < p.q.size(); ++i) {
    if (lib.members[i]) {
      p.q[i] = lib.field.value[i] / lib.w;
    }
  }
  return p;
}

/// q = (1 - eps) V / W on the library and eps / (N(X) - N(Phi)) on every
/// other cell.
inline SamplingPolicy epsilon_greedy_policy(const Library & lib, double epsilon)
{
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw DomainError("epsilon must lie in (0, 1)");
  }
  if (!(lib.w > 0.0)) {
    throw EmptyInput("library is empty (W = 0); no epsilon-greedy policy exists");
  }
  const std::size_t n = lib.field.value.size();
  const std::size_t members = lib.member_count();
  if (members >= n) {
    throw DomainError("library covers the whole grid; no cells left to explore");
  }
  const double outside = epsilon / static_cast<double>(n - members);
  SamplingPolicy p{lib.grid(), std::vector<double>(n, outside), PolicyKind::EpsilonGreedy,
                   epsilon};
  for (std::size_t i = 0; i < n; ++i) {
    if (lib.members[i]) {
      p.q[i] = (1.0 - epsilon) * lib.field.value[i] / lib.w;
    }
  }
  return p;
}

/// q = p: the on-road (crude Monte Carlo) testing distribution.
inline SamplingPolicy crude_policy(const ExposureModel & exposure)
{
  return {exposure.grid, exposure.mass, PolicyKind::Crude, 0.0};
}

struct EpsilonChoice
{
  double epsilon{0.0};
  double raw{0.0};
  bool clamped{false};
  std::string notice;
};

inline constexpr double kDefaultEpsMin = 0.01;
inline constexpr double kDefaultEpsMax = 0.5;

/// eps = 1 - W / mu_S, clamped into [eps_min, eps_max].
inline EpsilonChoice choose_epsilon(
  double w, double mu_s, double eps_min = kDefaultEpsMin, double eps_max = kDefaultEpsMax)
{
  if (!(mu_s > 0.0)) {
    throw DomainError("mu_S must be positive to choose epsilon");
  }
  if (!(w >= 0.0) || w > mu_s * (1.0 + 1e-12)) {
    throw DomainError("W must lie in [0, mu_S]");
  }
  if (!(0.0 < eps_min && eps_min <= eps_max && eps_max < 1.0)) {
    throw DomainError("epsilon clamp bounds must satisfy 0 < eps_min <= eps_max < 1");
  }
  EpsilonChoice c;
  c.raw = 1.0 - w / mu_s;
  c.epsilon = std::clamp(c.raw, eps_min, eps_max);
  c.clamped = c.epsilon != c.raw;
  if (c.clamped) {
    std::ostringstream os;
    os.precision(17);
    os << "epsilon " << c.raw << " clamped to " << c.epsilon;
    c.notice = os.str();
  }
  return c;
}

/// n independent draws from q by inverse CDF over the flat cell order.
inline std::vector<std::size_t> sample_scenarios(
  const SamplingPolicy & policy, std::size_t n, std::uint64_t seed)
{
  if (n == 0) {
    throw DomainError("sample count must be >= 1");
  }
  std::vector<double> cdf(policy.q.size());
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    acc += policy.q[i];
    cdf[i] = acc;
    if (policy.q[i] > 0.0) {
      last_positive = i;
    }
  }
  if (!(acc > 0.0)) {
    throw EmptyInput("sampling policy has no mass");
  }
  SplitMix64 rng(seed);
  std::vector<std::size_t> draws(n);
  for (auto & d : draws) {
    const double u = rng.uniform() * acc;
    auto i = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    d = std::min(i, last_positive);
  }
  return draws;
}

/// Result of testing the vehicle in one sampled scenario.
struct TestOutcome
{
  std::size_t cell{0};
  double value{0.0};  // event indicator, or event fraction over replications
  std::uint64_t seed{0};

  bool operator==(const TestOutcome &) const = default;
};

/// Tests `cav` on each drawn cell. Draw i runs with derive_seed(seed, i), so
/// outcomes do not depend on thread count.
inline std::vector<TestOutcome> run_tests(
  const VehicleModel & cav, const ScenarioGrid & grid, const OddConfig & odd,
  std::span<const std::size_t> draws, std::uint64_t seed, std::size_t replications = 1,
  unsigned threads = 1)
{
  validate(cav, "cav");
  std::vector<TestOutcome> out(draws.size());
  parallel_for(draws.size(), threads, [&](std::size_t i) {
    const std::uint64_t s = derive_seed(seed, i);
    out[i] = {draws[i], maneuver_challenge(cav, grid.point(draws[i]), odd, replications, s), s};
  });
  return out;
}

/// Two-sided standard-normal critical value for the supported levels.
inline double z_for_alpha(double alpha)
{
  struct Entry
  {
    double alpha;
    double z;
  };
  static constexpr Entry table[] = {
    {0.2, 1.2815515655446004}, {0.1, 1.6448536269514722}, {0.05, 1.96},
    {0.02, 2.3263478740408408}, {0.01, 2.5758293035489004}, {0.001, 3.2905267314919255},
  };
  for (const Entry & e : table) {
    if (std::abs(e.alpha - alpha) < 1e-12) {
      return e.z;
    }
  }
  throw InvalidConfig("alpha must be one of 0.2, 0.1, 0.05, 0.02, 0.01, 0.001");
}

/// Minimum number of tests for relative half-width beta at the confidence
/// level of z_alpha: ceil(z^2 sigma^2 / (beta^2 mu^2)), at least 1.
inline std::size_t required_tests(double z_alpha, double beta, double mu, double sigma_sq)
{
  if (!(beta > 0.0)) {
    throw DomainError("beta must be positive");
  }
  if (!(mu > 0.0)) {
    throw DomainError("mu must be positive");
  }
  if (!(sigma_sq >= 0.0)) {
    throw DomainError("sigma^2 must be non-negative");
  }
  const double n = std::ceil(z_alpha * z_alpha * sigma_sq / (beta * beta * mu * mu));
  return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

struct EvaluationReport
{
  double mu_hat{0.0};
  double sigma_sq_hat{0.0};
  std::size_t n{0};
  double ci_low{0.0};
  double ci_high{0.0};
  double alpha{0.05};
  double beta{0.2};
  double z_alpha{1.96};
  std::optional<std::size_t> required_n;  // empty when no event was observed
  std::string policy;
  double epsilon{0.0};
  double epsilon_raw{0.0};
  bool epsilon_clamped{false};
  std::string epsilon_notice;
  std::uint64_t seed{0};
  std::string config_hash;
  std::string library_hash;

  bool operator==(const EvaluationReport &) const = default;
};

/// Per-test importance-weighted terms p(x_i) / q(x_i) * f(x_i), in draw order.
inline std::vector<double> importance_terms(
  std::span<const TestOutcome> outcomes, const SamplingPolicy & policy,
  const ExposureModel & exposure)
{
  if (!(policy.grid == exposure.grid)) {
    throw GridMismatch("policy and exposure model are on different grids");
  }
  std::vector<double> terms(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const std::size_t cell = outcomes[i].cell;
    if (cell >= policy.q.size()) {
      throw OutOfBounds("outcome cell outside grid", 0);
    }
    if (!(policy.q[cell] > 0.0)) {
      throw SupportViolation("outcome in cell " + std::to_string(cell) +
                             " where the importance function is zero");
    }
    terms[i] = exposure.mass[cell] / policy.q[cell] * outcomes[i].value;
  }
  return terms;
}

namespace detail
{

inline void fill_interval(EvaluationReport & r)
{
  const double half =
    r.n > 0 ? r.z_alpha * std::sqrt(r.sigma_sq_hat) / std::sqrt(static_cast<double>(r.n)) : 0.0;
  r.ci_low = r.mu_hat - half;
  r.ci_high = r.mu_hat + half;
  if (r.mu_hat > 0.0) {
    r.required_n = required_tests(r.z_alpha, r.beta, r.mu_hat, r.sigma_sq_hat);
  }
}

}  // namespace detail

/// Importance-sampling estimate of the event probability. Sums run in a
/// fixed (cell, draw) order with compensation; sigma^2 is the unbiased
/// sample variance of the per-test terms.
inline EvaluationReport estimate_index(
  std::span<const TestOutcome> outcomes, const SamplingPolicy & policy,
  const ExposureModel & exposure, double alpha = 0.05, double beta = 0.2)
{
  if (outcomes.empty()) {
    throw EmptyInput("no test outcomes");
  }
  const std::vector<double> terms = importance_terms(outcomes, policy, exposure);
  std::vector<std::size_t> order(terms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return outcomes[a].cell < outcomes[b].cell;
  });

  EvaluationReport r;
  r.n = terms.size();
  r.alpha = alpha;
  r.beta = beta;
  r.z_alpha = z_for_alpha(alpha);
  r.policy = describe(policy);
  r.epsilon = policy.epsilon;
  r.epsilon_raw = policy.epsilon;

  CompensatedSum sum;
  for (std::size_t i : order) {
    sum.add(terms[i]);
  }
  r.mu_hat = sum.value() / static_cast<double>(r.n);
  if (r.n > 1) {
    CompensatedSum sq;
    for (std::size_t i : order) {
      const double d = terms[i] - r.mu_hat;
      sq.add(d * d);
    }
    r.sigma_sq_hat = sq.value() / static_cast<double>(r.n - 1);
  }
  detail::fill_interval(r);
  return r;
}

struct PolicyRun
{
  std::vector<std::size_t> draws;
  std::vector<TestOutcome> outcomes;
  EvaluationReport report;
};

/// Sample n scenarios from `policy` (derive_seed(seed, 0)), test `cav` on
/// them (derive_seed(seed, 1)) and estimate the index.
inline PolicyRun evaluate_policy(
  const SamplingPolicy & policy, const ExposureModel & exposure, const VehicleModel & cav,
  const OddConfig & odd, std::size_t n, std::uint64_t seed, double alpha = 0.05,
  double beta = 0.2, std::size_t replications = 1, unsigned threads = 1)
{
  PolicyRun run;
  run.draws = sample_scenarios(policy, n, derive_seed(seed, 0));
  run.outcomes =
    run_tests(cav, policy.grid, odd, run.draws, derive_seed(seed, 1), replications, threads);
  run.report = estimate_index(run.outcomes, policy, exposure, alpha, beta);
  run.report.seed = seed;
  return run;
}

/// On-road baseline: x_i ~ p, estimate m / n with binomial variance
/// mu_hat (1 - mu_hat).
inline EvaluationReport crude_mc_estimate(
  const ExposureModel & exposure, const VehicleModel & cav, const OddConfig & odd, std::size_t n,
  std::uint64_t seed, double alpha = 0.05, double beta = 0.2, std::size_t replications = 1,
  unsigned threads = 1)
{
  const SamplingPolicy policy = crude_policy(exposure);
  const std::vector<std::size_t> draws = sample_scenarios(policy, n, derive_seed(seed, 0));
  const std::vector<TestOutcome> outcomes =
    run_tests(cav, exposure.grid, odd, draws, derive_seed(seed, 1), replications, threads);

  EvaluationReport r;
  r.n = n;
  r.alpha = alpha;
  r.beta = beta;
  r.z_alpha = z_for_alpha(alpha);
  r.policy = describe(policy);
  r.seed = seed;
  CompensatedSum events;
  for (const TestOutcome & o : outcomes) {
    events.add(o.value);
  }
  r.mu_hat = events.value() / static_cast<double>(n);
  r.sigma_sq_hat = r.mu_hat * (1.0 - r.mu_hat);
  detail::fill_interval(r);
  return r;
}

struct ImportanceVerdict
{
  bool valid{true};
  double total{0.0};
  bool sums_to_one{true};
  std::vector<std::size_t> range_violations;    // q outside [0, 1]
  std::vector<std::size_t> support_violations;  // p > 0 but q = 0
};

/// Checks q in [0, 1], |sum q - 1| <= 1e-9 and p(x) > 0 => q(x) > 0.
inline ImportanceVerdict validate_importance_function(
  const SamplingPolicy & policy, const ExposureModel & exposure)
{
  if (!(policy.grid == exposure.grid)) {
    throw GridMismatch("policy and exposure model are on different grids");
  }
  ImportanceVerdict v;
  CompensatedSum total;
  for (std::size_t i = 0; i < policy.q.size(); ++i) {
    const double q = policy.q[i];
    total.add(q);
    if (!(q >= 0.0 && q <= 1.0)) {
      v.range_violations.push_back(i);
    }
    if (exposure.mass[i] > 0.0 && !(q > 0.0)) {
      v.support_violations.push_back(i);
    }
  }
  v.total = total.value();
  v.sums_to_one = std::abs(v.total - 1.0) <= 1e-9;
  v.valid = v.sums_to_one && v.range_violations.empty() && v.support_violations.empty();
  return v;
}

}  // namespace scenlib

#endif  // SCENLIB__EVALUATION_HPP_
