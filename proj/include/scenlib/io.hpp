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

#ifndef SCENLIB__IO_HPP_
#define SCENLIB__IO_HPP_

#include "scenlib/dynamics.hpp"
#include "scenlib/errors.hpp"
#include "scenlib/evaluation.hpp"
#include "scenlib/exposure.hpp"
#include "scenlib/library.hpp"
#include "scenlib/numeric.hpp"
#include "scenlib/oracle.hpp"
#include "scenlib/scenario_space.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace scenlib
{

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

/// Malformed or incompatible artifact file.
class FormatError : public Error
{
public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Text helpers

/// Shortest decimal text that parses back to exactly `x`.
inline std::string format_double(double x)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline std::string hex64(std::uint64_t v)
{
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

inline std::string read_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path & path, std::string_view bytes)
{
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline std::string digest(std::string_view bytes) { return hex64(fnv1a64(bytes)); }

// ---------------------------------------------------------------------------
// CSV

inline constexpr std::string_view kSamplesHeader = "range_m,range_rate_mps";
inline constexpr std::string_view kTraceHeader = "t,range_m,range_rate_mps,rel_accel_mps2";

inline std::string samples_to_csv(std::span<const Sample> samples)
{
  std::string out(kSamplesHeader);
  out += '\n';
  for (const Sample & s : samples) {
    for (std::size_t d = 0; d < s.size(); ++d) {
      if (d > 0) {
        out += ',';
      }
      out += format_double(s[d]);
    }
    out += '\n';
  }
  return out;
}

inline std::vector<Sample> samples_from_csv(std::string_view text)
{
  std::vector<Sample> samples;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (line_no == 1) {
      if (line != kSamplesHeader) {
        throw FormatError("samples CSV line 1: expected header \"" + std::string(kSamplesHeader) +
                          "\"");
      }
      continue;
    }
    if (line.empty()) {
      continue;
    }
    Sample s;
    std::size_t field_start = 0;
    while (true) {
      const std::size_t comma = line.find(',', field_start);
      const std::string_view field =
        line.substr(field_start, comma == std::string_view::npos ? line.npos : comma - field_start);
      double v = 0.0;
      const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw FormatError("samples CSV line " + std::to_string(line_no) + ": bad number \"" +
                          std::string(field) + "\"");
      }
      s.push_back(v);
      if (comma == std::string_view::npos) {
        break;
      }
      field_start = comma + 1;
    }
    if (s.size() != 2) {
      throw FormatError("samples CSV line " + std::to_string(line_no) + ": expected 2 columns");
    }
    samples.push_back(std::move(s));
  }
  if (line_no == 0) {
    throw FormatError("samples CSV is empty");
  }
  return samples;
}

inline std::string trace_to_csv(const EncounterTrace & trace)
{
  std::string out(kTraceHeader);
  out += '\n';
  for (const TraceSample & s : trace.samples) {
    out += format_double(s.t) + ',' + format_double(s.range) + ',' +
           format_double(s.range_rate) + ',' + format_double(s.rel_accel) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON encoders and decoders

namespace detail
{

inline json mask_to_json(const std::vector<bool> & mask)
{
  json a = json::array();
  for (bool b : mask) {
    a.push_back(b ? 1 : 0);
  }
  return a;
}

inline std::vector<bool> mask_from_json(const json & a)
{
  std::vector<bool> mask;
  mask.reserve(a.size());
  for (const auto & v : a) {
    mask.push_back(v.get<int>() != 0);
  }
  return mask;
}

inline void require_size(std::size_t got, std::size_t want, std::string_view what)
{
  if (got != want) {
    throw FormatError(std::string(what) + " has " + std::to_string(got) + " entries, grid has " +
                      std::to_string(want));
  }
}

}  // namespace detail

inline json to_json(const ScenarioGrid & grid)
{
  json axes = json::array();
  for (const Axis & a : grid.axes()) {
    axes.push_back({{"min", a.min}, {"max", a.max}, {"cells", a.cells}});
  }
  return {{"axes", axes}};
}

inline ScenarioGrid grid_from_json(const json & j)
{
  std::vector<AxisSpec> specs;
  for (const auto & a : j.at("axes")) {
    specs.push_back({a.at("min").get<double>(), a.at("max").get<double>(),
                     a.at("cells").get<std::size_t>()});
  }
  return ScenarioGrid(specs);
}

inline json to_json(const SearchSettings & s)
{
  return {{"start_count", s.start_count}, {"weight", s.weight},
          {"connectivity", std::string(to_string(s.connectivity))},
          {"seed", s.seed}, {"ettc_norm", s.ettc_norm},
          {"gamma_mode", std::string(to_string(s.gamma_mode))}};
}

inline SearchSettings search_from_json(const json & j)
{
  SearchSettings s;
  s.start_count = j.at("start_count").get<std::size_t>();
  s.weight = j.at("weight").get<double>();
  s.connectivity = parse_connectivity(j.at("connectivity").get<std::string>());
  s.seed = j.at("seed").get<std::uint64_t>();
  s.ettc_norm = j.at("ettc_norm").get<double>();
  s.gamma_mode = parse_gamma_mode(j.at("gamma_mode").get<std::string>());
  return s;
}

inline json to_json(const Library & lib)
{
  return {
    {"format_version", kFormatVersion},
    {"kind", "scenario-library"},
    {"grid", to_json(lib.grid())},
    {"exposure",
     {{"mass", lib.exposure.mass},
      {"zone_mask", detail::mask_to_json(lib.exposure.zone_mask)},
      {"zone_mass_target", lib.exposure.zone_mass_target},
      {"in_bounds", lib.exposure.in_bounds},
      {"out_of_bounds", lib.exposure.out_of_bounds}}},
    {"challenge",
     {{"value", lib.challenge.value},
      {"model", lib.challenge.model},
      {"replications", lib.challenge.replications}}},
    {"criticality", {{"value", lib.field.value}, {"mu_s", lib.field.mu_s}}},
    {"members", detail::mask_to_json(lib.members)},
    {"gamma", lib.gamma},
    {"W", lib.w},
    {"m_factor", lib.m_factor},
    {"provenance",
     {{"surrogate", lib.provenance.surrogate},
      {"exposure", lib.provenance.exposure},
      {"search", to_json(lib.provenance.search)}}},
  };
}

inline Library library_from_json(const json & j)
{
  try {
    if (j.at("format_version").get<int>() != kFormatVersion) {
      throw FormatError("unsupported library format_version " + j.at("format_version").dump());
    }
    if (j.at("kind").get<std::string>() != "scenario-library") {
      throw FormatError("file is not a scenario library");
    }
    Library lib;
    const ScenarioGrid grid = grid_from_json(j.at("grid"));
    const std::size_t n = grid.total_cells();

    const json & e = j.at("exposure");
    lib.exposure.grid = grid;
    lib.exposure.mass = e.at("mass").get<std::vector<double>>();
    lib.exposure.zone_mask = detail::mask_from_json(e.at("zone_mask"));
    lib.exposure.zone_mass_target = e.at("zone_mass_target").get<double>();
    lib.exposure.in_bounds = e.at("in_bounds").get<std::size_t>();
    lib.exposure.out_of_bounds = e.at("out_of_bounds").get<std::size_t>();

    const json & c = j.at("challenge");
    lib.challenge.grid = grid;
    lib.challenge.value = c.at("value").get<std::vector<double>>();
    lib.challenge.model = c.at("model").get<std::string>();
    lib.challenge.replications = c.at("replications").get<std::size_t>();

    const json & v = j.at("criticality");
    lib.field.grid = grid;
    lib.field.value = v.at("value").get<std::vector<double>>();
    lib.field.mu_s = v.at("mu_s").get<double>();

    lib.members = detail::mask_from_json(j.at("members"));
    lib.gamma = j.at("gamma").get<double>();
    lib.w = j.at("W").get<double>();
    lib.m_factor = j.at("m_factor").get<double>();

    const json & p = j.at("provenance");
    lib.provenance.surrogate = p.at("surrogate").get<std::string>();
    lib.provenance.exposure = p.at("exposure").get<std::string>();
    lib.provenance.search = search_from_json(p.at("search"));

    detail::require_size(lib.exposure.mass.size(), n, "exposure.mass");
    detail::require_size(lib.exposure.zone_mask.size(), n, "exposure.zone_mask");
    detail::require_size(lib.challenge.value.size(), n, "challenge.value");
    detail::require_size(lib.field.value.size(), n, "criticality.value");
    detail::require_size(lib.members.size(), n, "members");
    return lib;
  } catch (const json::exception & ex) {
    throw FormatError(std::string("library file: ") + ex.what());
  }
}

inline std::string dump(const json & j) { return j.dump(2) + "\n"; }

inline void save_library(const std::filesystem::path & path, const Library & lib)
{
  write_file(path, dump(to_json(lib)));
}

inline Library load_library(const std::filesystem::path & path)
{
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error & ex) {
    throw FormatError(path.string() + ": " + ex.what());
  }
  return library_from_json(j);
}

inline json to_json(const CompletenessReport & r)
{
  return {
    {"format_version", kFormatVersion},
    {"kind", "completeness-report"},
    {"oracle_enabled", r.oracle_enabled},
    {"exhaustive_count", r.exhaustive_count},
    {"found_count", r.found_count},
    {"missed_count", r.missed.size()},
    {"missed", r.missed},
    {"components_total", r.components_total},
    {"components_found", r.components_found},
    {"terminals", r.terminals},
    {"seeds", r.seeds},
    {"evaluations", r.evaluations},
    {"gamma_iterations", r.gamma_iterations},
    {"warnings", r.warnings},
  };
}

inline json to_json(const EvaluationReport & r)
{
  return {
    {"format_version", kFormatVersion},
    {"kind", "evaluation-report"},
    {"mu_hat", r.mu_hat},
    {"sigma_sq_hat", r.sigma_sq_hat},
    {"n", r.n},
    {"ci_low", r.ci_low},
    {"ci_high", r.ci_high},
    {"alpha", r.alpha},
    {"beta", r.beta},
    {"z_alpha", r.z_alpha},
    {"required_n", r.required_n ? json(*r.required_n) : json(nullptr)},
    {"policy", r.policy},
    {"epsilon", r.epsilon},
    {"epsilon_raw", r.epsilon_raw},
    {"epsilon_clamped", r.epsilon_clamped},
    {"epsilon_notice", r.epsilon_notice},
    {"seed", r.seed},
    {"config_hash", r.config_hash},
    {"library_hash", r.library_hash},
  };
}

inline EvaluationReport evaluation_report_from_json(const json & j)
{
  EvaluationReport r;
  r.mu_hat = j.at("mu_hat").get<double>();
  r.sigma_sq_hat = j.at("sigma_sq_hat").get<double>();
  r.n = j.at("n").get<std::size_t>();
  r.ci_low = j.at("ci_low").get<double>();
  r.ci_high = j.at("ci_high").get<double>();
  r.alpha = j.at("alpha").get<double>();
  r.beta = j.at("beta").get<double>();
  r.z_alpha = j.at("z_alpha").get<double>();
  if (!j.at("required_n").is_null()) {
    r.required_n = j.at("required_n").get<std::size_t>();
  }
  r.policy = j.at("policy").get<std::string>();
  r.epsilon = j.at("epsilon").get<double>();
  r.epsilon_raw = j.at("epsilon_raw").get<double>();
  r.epsilon_clamped = j.at("epsilon_clamped").get<bool>();
  r.epsilon_notice = j.at("epsilon_notice").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.config_hash = j.at("config_hash").get<std::string>();
  r.library_hash = j.at("library_hash").get<std::string>();
  return r;
}

inline json to_json(const OracleResult & r)
{
  json policies = json::array();
  for (const PolicyOracle & p : r.policies) {
    policies.push_back({{"policy", p.policy}, {"sigma_sq", p.sigma_sq}, {"bias", p.bias}});
  }
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < r.exhaustive_members.size(); ++i) {
    if (r.exhaustive_members[i]) {
      members.push_back(i);
    }
  }
  return {
    {"format_version", kFormatVersion},
    {"kind", "oracle-result"},
    {"mu", r.mu},
    {"mu_s", r.mu_s},
    {"exhaustive_count", r.exhaustive_count},
    {"exhaustive_members", members},
    {"variance_mode", r.variance_mode},
    {"policies", policies},
  };
}

}  // namespace scenlib

#endif  // SCENLIB__IO_HPP_
