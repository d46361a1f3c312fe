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

#include <cmath>
#include <limits>

namespace scenlib
{
namespace
{

std::filesystem::path scratch(const std::string & name)
{
  const auto dir = std::filesystem::temp_directory_path() / "scenlib_test_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}

TEST(LibraryFile, RoundTripIsBitExact)
{
  const Library & lib = testing::default_setup().library();
  const auto path = scratch("library.json");
  save_library(path, lib);
  const Library back = load_library(path);
  EXPECT_EQ(back, lib);
  EXPECT_EQ(dump(to_json(back)), read_file(path));
}

TEST(LibraryFile, AwkwardDoublesSurvive)
{
  Library lib = testing::toy_library(testing::line_grid(3), {1.0, 0.1, 0.0},
                                     {1.0 / 3.0, 2.0 / 3.0 - 1e-17, 0.0}, 0.0);
  lib.gamma = std::numeric_limits<double>::denorm_min();
  lib.m_factor = 1.0000000000000002;
  const Library back = library_from_json(json::parse(dump(to_json(lib))));
  EXPECT_EQ(back, lib);
}

TEST(LibraryFile, RejectsOtherVersionsAndKinds)
{
  json j = to_json(testing::toy_library(testing::line_grid(2), {1.0, 0.0}, {0.5, 0.5}, 0.0));
  EXPECT_EQ(j.at("format_version"), kFormatVersion);
  json wrong_version = j;
  wrong_version["format_version"] = 99;
  EXPECT_THROW(library_from_json(wrong_version), FormatError);
  json wrong_kind = j;
  wrong_kind["kind"] = "something-else";
  EXPECT_THROW(library_from_json(wrong_kind), FormatError);
  json truncated = j;
  truncated["members"] = json::array({1});
  EXPECT_THROW(library_from_json(truncated), FormatError);
  json missing = j;
  missing.erase("gamma");
  EXPECT_THROW(library_from_json(missing), FormatError);
}

TEST(SamplesCsv, RoundTrip)
{
  const std::vector<Sample> s{{1.5, -2.25}, {0.1, 1e-300}, {89.99999999999999, -20.0}};
  const std::string csv = samples_to_csv(s);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "range_m,range_rate_mps");
  EXPECT_EQ(samples_from_csv(csv), s);
}

TEST(SamplesCsv, Diagnostics)
{
  EXPECT_THROW(samples_from_csv(""), FormatError);
  EXPECT_THROW(samples_from_csv("x,y\n1,2\n"), FormatError);
  try {
    samples_from_csv("range_m,range_rate_mps\n1,2\n3,abc\n");
    FAIL();
  } catch (const FormatError & e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_THROW(samples_from_csv("range_m,range_rate_mps\n1,2,3\n"), FormatError);
  EXPECT_EQ(samples_from_csv("range_m,range_rate_mps\r\n1,2\r\n").size(), 1u);
}

TEST(TraceCsv, Header)
{
  const auto trace =
    simulate_encounter(VehicleModel{}, {{0, 0}, {30.0, -5.0}}, OddConfig{}, 0);
  const std::string csv = trace_to_csv(trace);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,range_m,range_rate_mps,rel_accel_mps2");
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')),
            trace.samples.size() + 1);
}

TEST(EvaluationReportJson, RoundTrip)
{
  EvaluationReport r;
  r.mu_hat = 0.0123456789;
  r.sigma_sq_hat = 1.0 / 3.0;
  r.n = 500;
  r.ci_low = 0.01;
  r.ci_high = 0.014;
  r.required_n = 42;
  r.policy = "epsilon-greedy(epsilon=0.01)";
  r.epsilon = 0.01;
  r.epsilon_raw = 0.002;
  r.epsilon_clamped = true;
  r.epsilon_notice = "clamped";
  r.seed = 18446744073709551615ULL;
  r.config_hash = "abc";
  r.library_hash = "def";
  const json j = to_json(r);
  EXPECT_EQ(j.at("format_version"), kFormatVersion);
  EXPECT_EQ(evaluation_report_from_json(j), r);
  r.required_n.reset();
  EXPECT_TRUE(to_json(r).at("required_n").is_null());
  EXPECT_EQ(evaluation_report_from_json(to_json(r)), r);
}

TEST(FormatDouble, ShortestRoundTrip)
{
  for (double x : {0.1, 1.0 / 3.0, 5e-324, 1e300, -0.0, 123456789.125}) {
    EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
}

TEST(Digest, StableFnv)
{
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(digest("a"), "af63dc4c8601ec8c");
}

// --- config --------------------------------------------------------------

TEST(Config, DefaultParses)
{
  const ExperimentConfig cfg = load_config(testing::default_config_path());
  EXPECT_EQ(cfg.odd, OddConfig{});
  EXPECT_EQ(cfg.ndd.components.size(), 2u);
  EXPECT_EQ(cfg.surrogate.max_decel, 6.0);
  EXPECT_NEAR(cfg.cav.max_decel, 6.6, 1e-12);
  EXPECT_EQ(cfg.evaluation.n_tests, 500u);
  EXPECT_FALSE(cfg.evaluation.epsilon);
  EXPECT_EQ(cfg.ndd.seed, derive_seed(cfg.seed, stream::kNdd));
  EXPECT_EQ(cfg.search.seed, derive_seed(cfg.seed, stream::kSearch));
}

std::string minimal(const std::string & extra = "")
{
  return R"({"seed": 1, "odd": {}, "ndd": {"components": [{"weight": 1, "mean": [45, 0], "std": [10, 3]}]},
  "surrogate": {}, "cav": {})" + extra + "}";
}

TEST(Config, MinimalUsesDefaults)
{
  const ExperimentConfig cfg = parse_config(minimal());
  EXPECT_EQ(cfg.seed, 1u);
  EXPECT_EQ(cfg.search.start_count, 100u);
  EXPECT_EQ(cfg.evaluation.policy, PolicyKind::EpsilonGreedy);
  EXPECT_EQ(cfg.outputs.library, "library.json");
}

std::string error_of(const std::string & text)
{
  try {
    parse_config(text);
  } catch (const ConfigError & e) {
    return e.what();
  }
  return "";
}

TEST(Config, SyntaxErrorHasLineAndColumn)
{
  const std::string msg = error_of("{\n  \"seed\": 1,\n  \"odd\": {,}\n}");
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("column"), std::string::npos) << msg;
}

TEST(Config, FieldDiagnostics)
{
  EXPECT_NE(error_of(R"({"odd": {}})").find("'seed'"), std::string::npos);
  EXPECT_NE(error_of(minimal(R"(, "bogus": 1)")).find("bogus"), std::string::npos);
  EXPECT_NE(error_of(minimal(R"(, "search": {"start_count": 0})")).find("search"),
            std::string::npos);
  EXPECT_NE(error_of(minimal(R"(, "evaluation": {"alpha": 0.07})")).find("evaluation.alpha"),
            std::string::npos);
  EXPECT_NE(error_of(minimal(R"(, "evaluation": {"epsilon": 1.5})")).find("evaluation.epsilon"),
            std::string::npos);
  EXPECT_NE(error_of(minimal(R"(, "m_factor": 0.5)")).find("m_factor"), std::string::npos);
  const std::string odd = error_of(R"({"seed": 1, "odd": {"range_cells": 1}, "ndd": {}, "surrogate": {}, "cav": {}})");
  EXPECT_NE(odd.find("odd"), std::string::npos) << odd;
  const std::string kind = error_of(R"({"seed": 1, "odd": {}, "ndd": {"components": [{"weight": 1, "mean": [45, 0], "std": [10, 3]}]}, "surrogate": {"kind": "rocket"}, "cav": {}})");
  EXPECT_NE(kind.find("surrogate.kind"), std::string::npos) << kind;
  const std::string type = error_of(R"({"seed": "one", "odd": {}, "ndd": {}, "surrogate": {}, "cav": {}})");
  EXPECT_NE(type.find("seed"), std::string::npos) << type;
}

TEST(Config, DeterministicCavRejectsReplications)
{
  EXPECT_FALSE(error_of(minimal(R"(, "evaluation": {"replications_per_test": 3})")).empty());
}

TEST(Config, MissingFileIsConfigError)
{
  EXPECT_THROW(load_config("/nonexistent/scenlib.json"), ConfigError);
}

}  // namespace
}  // namespace scenlib
