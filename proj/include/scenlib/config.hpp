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

#ifndef SCENLIB__CONFIG_HPP_
#define SCENLIB__CONFIG_HPP_

#include "scenlib/dynamics.hpp"
#include "scenlib/errors.hpp"
#include "scenlib/evaluation.hpp"
#include "scenlib/exposure.hpp"
#include "scenlib/io.hpp"
#include "scenlib/library.hpp"
#include "scenlib/random.hpp"
#include "scenlib/scenario_space.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>

namespace scenlib
{

/// Config file could not be parsed or a field is invalid. The message names
/// the line/column (syntax errors) or the dotted field path.
class ConfigError : public InvalidConfig
{
public:
  using InvalidConfig::InvalidConfig;
};

struct EvaluationSettings
{
  PolicyKind policy{PolicyKind::EpsilonGreedy};
  std::optional<double> epsilon;  // empty = chosen from W and mu_S
  double eps_min{kDefaultEpsMin};
  double eps_max{kDefaultEpsMax};
  std::size_t n_tests{500};
  double alpha{0.05};
  double beta{0.2};
  std::size_t replications_per_test{1};

  bool operator==(const EvaluationSettings &) const = default;
};

struct OutputPaths
{
  std::string ndd_csv{"ndd.csv"};
  std::string library{"library.json"};
  std::string completeness{"completeness.json"};
  std::string evaluation{"evaluation.json"};
  std::string oracle{"oracle.json"};
  std::string compare{"compare.csv"};

  bool operator==(const OutputPaths &) const = default;
};

struct ExperimentConfig
{
  std::uint64_t seed{0};
  OddConfig odd;
  NddSpec ndd;
  std::optional<std::string> ndd_csv;  // read samples from here instead of synthesizing
  double zone_mass_target{kDefaultZoneMassTarget};
  VehicleModel surrogate;
  std::size_t surrogate_replications{1};
  VehicleModel cav;
  std::size_t cav_replications{1};
  SearchSettings search;
  double m_factor{1.0};
  EvaluationSettings evaluation;
  OutputPaths outputs;

  /// Sub-stream seeds follow the experiment seed (see random.hpp).
  void apply_seed(std::uint64_t s)
  {
    seed = s;
    ndd.seed = derive_seed(s, stream::kNdd);
    search.seed = derive_seed(s, stream::kSearch);
  }

  bool operator==(const ExperimentConfig &) const = default;
};

namespace detail
{

class FieldReader
{
public:
  FieldReader(const nlohmann::json & obj, std::string path) : obj_(obj), path_(std::move(path))
  {
    if (!obj_.is_object()) {
      fail("", "expected an object");
    }
  }

  [[noreturn]] void fail(std::string_view key, std::string_view msg) const
  {
    throw ConfigError("config field '" + join(key) + "': " + std::string(msg));
  }

  std::string join(std::string_view key) const
  {
    if (key.empty()) {
      return path_.empty() ? "<root>" : path_;
    }
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  void only(std::initializer_list<std::string_view> allowed) const
  {
    for (const auto & [k, v] : obj_.items()) {
      bool known = false;
      for (auto a : allowed) {
        known = known || a == k;
      }
      if (!known) {
        fail(k, "unknown field");
      }
    }
  }

  bool has(std::string_view key) const { return obj_.contains(std::string(key)); }

  const nlohmann::json & at(std::string_view key) const
  {
    if (!has(key)) {
      fail(key, "missing required field");
    }
    return obj_.at(std::string(key));
  }

  void number(std::string_view key, double & out) const
  {
    if (!has(key)) {
      return;
    }
    const auto & v = at(key);
    if (!v.is_number()) {
      fail(key, "expected a number");
    }
    out = v.get<double>();
  }

  void count(std::string_view key, std::size_t & out) const
  {
    if (!has(key)) {
      return;
    }
    const auto & v = at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                   v.get<std::int64_t>() < 0)) {
      fail(key, "expected a non-negative integer");
    }
    out = v.get<std::size_t>();
  }

  void u64(std::string_view key, std::uint64_t & out) const
  {
    if (!has(key)) {
      return;
    }
    const auto & v = at(key);
    if (!v.is_number_unsigned()) {
      fail(key, "expected an unsigned 64-bit integer");
    }
    out = v.get<std::uint64_t>();
  }

  std::string text(std::string_view key) const
  {
    const auto & v = at(key);
    if (!v.is_string()) {
      fail(key, "expected a string");
    }
    return v.get<std::string>();
  }

  std::vector<double> numbers(std::string_view key) const
  {
    const auto & v = at(key);
    if (!v.is_array()) {
      fail(key, "expected an array of numbers");
    }
    std::vector<double> out;
    for (const auto & x : v) {
      if (!x.is_number()) {
        fail(key, "expected an array of numbers");
      }
      out.push_back(x.get<double>());
    }
    return out;
  }

  FieldReader child(std::string_view key) const { return FieldReader(at(key), join(key)); }

  const std::string & path() const { return path_; }

private:
  const nlohmann::json & obj_;
  std::string path_;
};

// Runs f, rewrapping domain errors as ConfigError under `path`.
template <class F>
void checked(std::string_view path, F && f)
{
  try {
    f();
  } catch (const ConfigError &) {
    throw;
  } catch (const Error & e) {
    throw ConfigError("config field '" + std::string(path) + "': " + e.what());
  }
}

inline VehicleModel read_model(const FieldReader & r, std::size_t & replications)
{
  r.only({"kind", "reaction_time", "max_decel", "desired_gap", "time_headway", "max_accel",
          "comfort_decel", "noise_std", "replications"});
  VehicleModel m;
  if (r.has("kind")) {
    checked(r.join("kind"), [&] { m.kind = parse_model_kind(r.text("kind")); });
  }
  r.number("reaction_time", m.reaction_time);
  r.number("max_decel", m.max_decel);
  r.number("desired_gap", m.desired_gap);
  r.number("time_headway", m.time_headway);
  r.number("max_accel", m.max_accel);
  r.number("comfort_decel", m.comfort_decel);
  r.number("noise_std", m.noise_std);
  r.count("replications", replications);
  checked(r.path(), [&] { validate(m, r.path()); });
  if (replications == 0) {
    r.fail("replications", "must be >= 1");
  }
  if (m.deterministic() && replications != 1) {
    r.fail("replications", "must be 1 for a deterministic model (noise_std = 0)");
  }
  return m;
}

}  // namespace detail

/// Parses an experiment config (JSON). Relative paths stay relative; callers
/// resolve them against the config file's directory.
inline ExperimentConfig parse_config(std::string_view text)
{
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error & ex) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t upto = std::min<std::size_t>(ex.byte > 0 ? ex.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError("config parse error at line " + std::to_string(line) + ", column " +
                      std::to_string(column) + ": " + ex.what());
  }

  using detail::FieldReader;
  const FieldReader r(root, "");
  r.only({"format_version", "seed", "odd", "ndd", "surrogate", "cav", "search", "m_factor",
          "evaluation", "outputs"});

  ExperimentConfig cfg;
  if (r.has("format_version")) {
    std::size_t v = 0;
    r.count("format_version", v);
    if (v != static_cast<std::size_t>(kFormatVersion)) {
      r.fail("format_version", "unsupported version");
    }
  }
  if (!r.has("seed")) {
    r.fail("seed", "missing required field (runs are seeded explicitly)");
  }
  std::uint64_t seed = 0;
  r.u64("seed", seed);

  {
    const FieldReader o = r.child("odd");
    o.only({"range_min", "range_max", "range_rate_min", "range_rate_max", "range_cells",
            "range_rate_cells", "ego_speed", "sim_horizon", "sim_dt", "event_gap_threshold"});
    o.number("range_min", cfg.odd.range_min);
    o.number("range_max", cfg.odd.range_max);
    o.number("range_rate_min", cfg.odd.range_rate_min);
    o.number("range_rate_max", cfg.odd.range_rate_max);
    o.count("range_cells", cfg.odd.range_cells);
    o.count("range_rate_cells", cfg.odd.range_rate_cells);
    o.number("ego_speed", cfg.odd.ego_speed);
    o.number("sim_horizon", cfg.odd.sim_horizon);
    o.number("sim_dt", cfg.odd.sim_dt);
    o.number("event_gap_threshold", cfg.odd.event_gap_threshold);
    detail::checked("odd", [&] { validate(cfg.odd); });
  }
  const ScenarioGrid grid = build_grid(cfg.odd);

  {
    const FieldReader n = r.child("ndd");
    n.only({"csv", "sample_count", "components", "zone_mass_target"});
    if (n.has("csv")) {
      cfg.ndd_csv = n.text("csv");
    }
    n.count("sample_count", cfg.ndd.sample_count);
    n.number("zone_mass_target", cfg.zone_mass_target);
    if (!(cfg.zone_mass_target > 0.0 && cfg.zone_mass_target < 1.0)) {
      n.fail("zone_mass_target", "must lie in (0, 1)");
    }
    if (n.has("components")) {
      const auto & comps = n.at("components");
      if (!comps.is_array()) {
        n.fail("components", "expected an array");
      }
      for (std::size_t k = 0; k < comps.size(); ++k) {
        const FieldReader c(comps[k], n.join("components") + "[" + std::to_string(k) + "]");
        c.only({"weight", "mean", "std"});
        MixtureComponent mc;
        c.number("weight", mc.weight);
        mc.mean = c.numbers("mean");
        mc.stddev = c.numbers("std");
        cfg.ndd.components.push_back(std::move(mc));
      }
    }
    if (!cfg.ndd_csv) {
      detail::checked("ndd", [&] { validate(cfg.ndd, grid); });
    }
  }

  cfg.surrogate = detail::read_model(r.child("surrogate"), cfg.surrogate_replications);
  cfg.cav = detail::read_model(r.child("cav"), cfg.cav_replications);

  if (r.has("search")) {
    const FieldReader s = r.child("search");
    s.only({"start_count", "weight", "connectivity", "ettc_norm", "gamma_mode"});
    s.count("start_count", cfg.search.start_count);
    s.number("weight", cfg.search.weight);
    s.number("ettc_norm", cfg.search.ettc_norm);
    if (s.has("connectivity")) {
      detail::checked(s.join("connectivity"), [&] {
        cfg.search.connectivity = parse_connectivity(s.text("connectivity"));
      });
    }
    if (s.has("gamma_mode")) {
      detail::checked(s.join("gamma_mode"), [&] {
        cfg.search.gamma_mode = parse_gamma_mode(s.text("gamma_mode"));
      });
    }
    detail::checked("search", [&] { validate(cfg.search); });
  }

  r.number("m_factor", cfg.m_factor);
  if (!(cfg.m_factor >= 1.0)) {
    r.fail("m_factor", "must be >= 1");
  }

  if (r.has("evaluation")) {
    const FieldReader e = r.child("evaluation");
    e.only({"policy", "epsilon", "eps_min", "eps_max", "n_tests", "alpha", "beta",
            "replications_per_test"});
    auto & ev = cfg.evaluation;
    if (e.has("policy")) {
      detail::checked(e.join("policy"), [&] { ev.policy = parse_policy_kind(e.text("policy")); });
    }
    if (e.has("epsilon")) {
      const auto & v = e.at("epsilon");
      if (v.is_string() && v.get<std::string>() == "auto") {
        ev.epsilon.reset();
      } else if (v.is_number()) {
        ev.epsilon = v.get<double>();
        if (!(*ev.epsilon > 0.0 && *ev.epsilon < 1.0)) {
          e.fail("epsilon", "must lie in (0, 1) or be \"auto\"");
        }
      } else {
        e.fail("epsilon", "expected a number or \"auto\"");
      }
    }
    e.number("eps_min", ev.eps_min);
    e.number("eps_max", ev.eps_max);
    if (!(0.0 < ev.eps_min && ev.eps_min <= ev.eps_max && ev.eps_max < 1.0)) {
      e.fail("eps_min", "clamp bounds must satisfy 0 < eps_min <= eps_max < 1");
    }
    e.count("n_tests", ev.n_tests);
    if (ev.n_tests < 1) {
      e.fail("n_tests", "must be >= 1");
    }
    e.number("alpha", ev.alpha);
    detail::checked(e.join("alpha"), [&] { (void)z_for_alpha(ev.alpha); });
    e.number("beta", ev.beta);
    if (!(ev.beta > 0.0)) {
      e.fail("beta", "must be > 0");
    }
    e.count("replications_per_test", ev.replications_per_test);
    if (ev.replications_per_test < 1) {
      e.fail("replications_per_test", "must be >= 1");
    }
    if (cfg.cav.deterministic() && ev.replications_per_test != 1) {
      e.fail("replications_per_test", "must be 1 for a deterministic cav");
    }
  }

  if (r.has("outputs")) {
    const FieldReader o = r.child("outputs");
    o.only({"ndd_csv", "library", "completeness", "evaluation", "oracle", "compare"});
    auto & out = cfg.outputs;
    for (auto [key, field] : {std::pair{"ndd_csv", &out.ndd_csv}, {"library", &out.library},
                              {"completeness", &out.completeness},
                              {"evaluation", &out.evaluation}, {"oracle", &out.oracle},
                              {"compare", &out.compare}}) {
      if (o.has(key)) {
        *field = o.text(key);
      }
    }
  }

  cfg.apply_seed(seed);
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path & path)
{
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error & e) {
    throw ConfigError(e.what());
  }
  return parse_config(text);
}

}  // namespace scenlib

#endif  // SCENLIB__CONFIG_HPP_
