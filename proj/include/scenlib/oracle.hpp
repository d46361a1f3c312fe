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

#ifndef SCENLIB__ORACLE_HPP_
#define SCENLIB__ORACLE_HPP_

#include "scenlib/critical_set.hpp"
#include "scenlib/dynamics.hpp"
#include "scenlib/errors.hpp"
#include "scenlib/evaluation.hpp"
#include "scenlib/exposure.hpp"
#include "scenlib/library.hpp"
#include "scenlib/numeric.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scenlib
{

// Exhaustive ground truth on the finite grid. Every sum runs over cells in
// ascending flat order with compensation.

inline double exact_index(std::span<const double> f, std::span<const double> p)
{
  if (f.size() != p.size()) {
    throw GridMismatch("event field and exposure have different sizes");
  }
  CompensatedSum mu;
  for (std::size_t i = 0; i < f.size(); ++i) {
    mu.add(f[i] * p[i]);
  }
  return mu.value();
}

inline double exact_index(const ChallengeField & f, const ExposureModel & exposure)
{
  if (!(f.grid == exposure.grid)) {
    throw GridMismatch("event field and exposure model are on different grids");
  }
  return exact_index(f.value, exposure.mass);
}

/// deterministic: the per-test outcome is the known probability f(x).
/// bernoulli: the per-test outcome is a single Bernoulli(f(x)) draw.
enum class VarianceMode { Deterministic, Bernoulli };

inline std::string_view to_string(VarianceMode m) noexcept
{
  return m == VarianceMode::Deterministic ? "deterministic" : "bernoulli";
}

/// Exact mean and variance of one importance-weighted term T = p/q * outcome
/// for x ~ q. Cells with q = 0 are never drawn and contribute nothing, so
/// `mean` differs from the true index when q misses part of the support.
struct EstimatorMoments
{
  double mean{0.0};
  double variance{0.0};
};

inline EstimatorMoments estimator_moments(
  std::span<const double> f, std::span<const double> p, std::span<const double> q,
  VarianceMode mode)
{
  if (f.size() != p.size() || q.size() != p.size()) {
    throw GridMismatch("event field, exposure and policy have different sizes");
  }
  CompensatedSum mean;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (q[i] > 0.0) {
      mean.add(p[i] * f[i]);
    }
  }
  EstimatorMoments m{mean.value(), 0.0};

  // Centered form, non-negative term by term.
  CompensatedSum var;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(q[i] > 0.0)) {
      continue;
    }
    const double weight = p[i] / q[i];
    if (mode == VarianceMode::Deterministic) {
      const double d = weight * f[i] - m.mean;
      var.add(q[i] * d * d);
    } else {
      const double hit = weight - m.mean;
      var.add(q[i] * (f[i] * hit * hit + (1.0 - f[i]) * m.mean * m.mean));
    }
  }
  m.variance = var.value();
  return m;
}

/// Exact per-test variance sigma^2 of the importance-sampling estimator.
/// Throws SupportViolation when q(x) = 0 somewhere f(x) p(x) > 0.
inline double exact_policy_variance(
  std::span<const double> f, std::span<const double> p, std::span<const double> q,
  VarianceMode mode = VarianceMode::Deterministic)
{
  if (f.size() != p.size() || q.size() != p.size()) {
    throw GridMismatch("event field, exposure and policy have different sizes");
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] * p[i] > 0.0 && !(q[i] > 0.0)) {
      throw SupportViolation("policy has q = 0 at cell " + std::to_string(i) +
                             " where f p > 0");
    }
  }
  return estimator_moments(f, p, q, mode).variance;
}

inline double exact_policy_variance(
  const ChallengeField & f, const ExposureModel & exposure, const SamplingPolicy & policy,
  VarianceMode mode = VarianceMode::Deterministic)
{
  if (!(f.grid == exposure.grid) || !(policy.grid == exposure.grid)) {
    throw GridMismatch("event field, exposure and policy are on different grids");
  }
  return exact_policy_variance(f.value, exposure.mass, policy.q, mode);
}

inline std::vector<bool> exact_library(const CriticalityField & field, double gamma)
{
  return exact_library(field.value, gamma);
}

struct PolicyOracle
{
  std::string policy;
  double sigma_sq{0.0};  // about the estimator's own mean
  double bias{0.0};      // E[mu_hat] - mu
};

struct OracleResult
{
  double mu{0.0};
  double mu_s{0.0};
  std::vector<bool> exhaustive_members;
  std::size_t exhaustive_count{0};
  std::vector<PolicyOracle> policies;
  std::string variance_mode;
};

/// Ground truth for the vehicle under test against a library and a set of
/// policies. Policies missing part of the support report their bias instead
/// of failing.
inline OracleResult compute_oracle(
  const ChallengeField & f_a, const Library & lib, std::span<const SamplingPolicy> policies,
  VarianceMode mode)
{
  OracleResult r;
  r.mu = exact_index(f_a, lib.exposure);
  r.mu_s = lib.field.mu_s;
  r.exhaustive_members = exact_library(lib.field, lib.gamma);
  for (bool b : r.exhaustive_members) {
    r.exhaustive_count += b ? 1 : 0;
  }
  r.variance_mode = std::string(to_string(mode));
  for (const SamplingPolicy & p : policies) {
    const EstimatorMoments m = estimator_moments(f_a.value, lib.exposure.mass, p.q, mode);
    r.policies.push_back({describe(p), m.variance, m.mean - r.mu});
  }
  return r;
}

}  // namespace scenlib

#endif  // SCENLIB__ORACLE_HPP_
