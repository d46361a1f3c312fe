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


// End-to-end runs of the scenlib executable.

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <functional>
#include <map>
#include <unistd.h>
#include <fstream>
#include <sstream>

namespace scenlib
{
namespace
{

namespace fs = std::filesystem;

struct CliRun
{
  int code;
  std::string err;
};

fs::path work_root()
{
  static const fs::path root = [] {
    const fs::path p = fs::temp_directory_path() / ("scenlib_cli_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

CliRun cli(const std::string & args)
{
  const fs::path err = work_root() / "stderr.txt";
  const std::string cmd =
    std::string(SCENLIB_CLI) + " " + args + " 2> '" + err.string() + "' > /dev/null";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(err)};
}

std::string quoted(const fs::path & p) { return "'" + p.string() + "'"; }

// Default config with edits, written under the work directory.
fs::path config_with(const std::string & name, const std::function<void(json &)> & edit)
{
  json j = json::parse(read_file(testing::default_config_path()));
  edit(j);
  const fs::path p = work_root() / (name + ".json");
  write_file(p, dump(j));
  return p;
}

std::string run_args(const std::string & cmd, const fs::path & config, const fs::path & out,
                     const std::string & extra = "")
{
  return cmd + " --config " + quoted(config) + " --out " + quoted(out) + " " + extra;
}

std::map<std::string, std::string> files_in(const fs::path & dir)
{
  std::map<std::string, std::string> out;
  for (const auto & e : fs::directory_iterator(dir)) {
    out[e.path().filename().string()] = read_file(e.path());
  }
  return out;
}

// Every command twice per thread count; all outputs must match byte for byte.
TEST(Cli, ByteIdenticalAcrossRunsAndThreads)
{
  const fs::path cfg = testing::default_config_path();
  std::vector<std::map<std::string, std::string>> results;
  int k = 0;
  for (const char * threads : {"1", "1", "4"}) {
    const fs::path out = work_root() / ("det" + std::to_string(k++));
    for (const char * cmd : {"gen-ndd", "build-library", "evaluate", "oracle", "compare"}) {
      const CliRun r = cli(run_args(cmd, cfg, out, std::string("--threads ") + threads));
      ASSERT_EQ(r.code, 0) << cmd << ": " << r.err;
    }
    results.push_back(files_in(out));
  }
  EXPECT_EQ(results[0].size(), 11u);
  EXPECT_EQ(results[0], results[1]);
  EXPECT_EQ(results[0], results[2]);
}

TEST(Cli, GenNddWritesHeaderPlusSamples)
{
  const fs::path cfg = config_with("small", [](json & j) { j["ndd"]["sample_count"] = 1234; });
  const fs::path out = work_root() / "ndd";
  ASSERT_EQ(cli(run_args("gen-ndd", cfg, out)).code, 0);
  const std::string csv = read_file(out / "ndd.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1235);
  EXPECT_EQ(csv.rfind("range_m,range_rate_mps\n", 0), 0u);
  const json manifest = json::parse(read_file(out / "gen-ndd.manifest.json"));
  EXPECT_EQ(manifest.at("outputs").at("ndd.csv"), digest(csv));
  EXPECT_FALSE(manifest.contains("timings_s"));
}

TEST(Cli, TimingsOnlyOnRequest)
{
  const fs::path cfg = config_with("timed", [](json & j) { j["ndd"]["sample_count"] = 100; });
  const fs::path out = work_root() / "timed";
  ASSERT_EQ(cli(run_args("gen-ndd", cfg, out, "--timings")).code, 0);
  EXPECT_TRUE(json::parse(read_file(out / "gen-ndd.manifest.json")).contains("timings_s"));
}

TEST(Cli, MalformedConfigExits2)
{
  const fs::path bad = work_root() / "bad.json";
  write_file(bad, "{\n  \"seed\": 1,\n  \"odd\": [\n");
  const CliRun r = cli(run_args("gen-ndd", bad, work_root() / "bad"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line"), std::string::npos) << r.err;

  const fs::path unknown = config_with("unknown", [](json & j) { j["odd"]["cells"] = 3; });
  const CliRun u = cli(run_args("build-library", unknown, work_root() / "bad"));
  EXPECT_EQ(u.code, 2);
  EXPECT_NE(u.err.find("odd.cells"), std::string::npos) << u.err;

  EXPECT_EQ(cli(run_args("gen-ndd", work_root() / "missing.json", work_root() / "bad")).code, 2);
  EXPECT_EQ(cli("gen-ndd").code, 2);
  EXPECT_EQ(cli("frobnicate --config x").code, 2);
}

TEST(Cli, ZeroChallengeSurrogateExits3)
{
  const CliRun r =
    cli(run_args("build-library", testing::source_dir() / "configs" / "zero_challenge.json",
                 work_root() / "zero"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("mu_S"), std::string::npos);
}

struct Built
{
  fs::path out;
  fs::path config;
};

const Built & built_default()
{
  static const Built b = [] {
    Built x{work_root() / "built", testing::default_config_path()};
    const CliRun r = cli(run_args("build-library", x.config, x.out));
    EXPECT_EQ(r.code, 0) << r.err;
    return x;
  }();
  return b;
}

TEST(Cli, LibraryRoundTripsAndReportIsConsistent)
{
  const Built & b = built_default();
  const std::string bytes = read_file(b.out / "library.json");
  const Library lib = load_library(b.out / "library.json");
  EXPECT_EQ(dump(to_json(lib)), bytes);

  const json report = json::parse(read_file(b.out / "completeness.json"));
  const auto exact = exact_library(lib.field.value, lib.gamma);
  std::vector<std::size_t> missed;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    if (exact[i] && !lib.members[i]) {
      missed.push_back(i);
    }
  }
  EXPECT_EQ(report.at("missed").get<std::vector<std::size_t>>(), missed);
  EXPECT_EQ(report.at("missed_count").get<std::size_t>(), missed.size());
}

TEST(Cli, EvaluateGreedyWithSurrogateAsCav)
{
  const Built & b = built_default();
  const fs::path cfg = config_with("same", [](json & j) {
    j["cav"] = j["surrogate"];
    j["evaluation"]["policy"] = "greedy";
  });
  const fs::path out = work_root() / "same";
  const std::string lib = "--library " + quoted(b.out / "library.json");
  ASSERT_EQ(cli(run_args("evaluate", cfg, out, lib)).code, 0);
  const std::string first = read_file(out / "evaluation.json");
  const EvaluationReport r = evaluation_report_from_json(json::parse(first));
  EXPECT_LE(r.sigma_sq_hat, 1e-20);
  EXPECT_EQ(r.n, 500u);
  EXPECT_EQ(r.library_hash, digest(read_file(b.out / "library.json")));
  ASSERT_EQ(cli(run_args("evaluate", cfg, out, lib)).code, 0);
  EXPECT_EQ(read_file(out / "evaluation.json"), first);
}

TEST(Cli, EvaluateReportsAutomaticEpsilon)
{
  const Built & b = built_default();
  const fs::path out = work_root() / "eps";
  ASSERT_EQ(cli(run_args("evaluate", b.config, out,
                         "--library " + quoted(b.out / "library.json"))).code, 0);
  const EvaluationReport r =
    evaluation_report_from_json(json::parse(read_file(out / "evaluation.json")));
  const Library lib = load_library(b.out / "library.json");
  const EpsilonChoice expected = choose_epsilon(lib.w, lib.field.mu_s);
  EXPECT_EQ(r.epsilon, expected.epsilon);
  EXPECT_EQ(r.epsilon_raw, expected.raw);
  EXPECT_EQ(r.epsilon_clamped, expected.clamped);
  EXPECT_LE(r.ci_low, r.mu_hat);
  EXPECT_GE(r.ci_high, r.mu_hat);
  ASSERT_TRUE(r.required_n);
}

TEST(Cli, ClampNoticeReachesReport)
{
  const Built & b = built_default();
  const fs::path cfg = config_with("clamp", [](json & j) { j["evaluation"]["eps_min"] = 0.1; });
  const fs::path out = work_root() / "clamp";
  const CliRun run = cli(run_args("evaluate", cfg, out, "--library " + quoted(b.out / "library.json")));
  ASSERT_EQ(run.code, 0) << run.err;
  const EvaluationReport r =
    evaluation_report_from_json(json::parse(read_file(out / "evaluation.json")));
  EXPECT_TRUE(r.epsilon_clamped);
  EXPECT_EQ(r.epsilon, 0.1);
  EXPECT_FALSE(r.epsilon_notice.empty());
  EXPECT_NE(run.err.find("clamped"), std::string::npos);
}

TEST(Cli, MismatchedLibraryExits4)
{
  const Built & b = built_default();
  const fs::path cfg = config_with("coarse", [](json & j) { j["odd"]["range_cells"] = 31; });
  const std::string lib = "--library " + quoted(b.out / "library.json");
  for (const char * cmd : {"evaluate", "oracle", "compare"}) {
    const CliRun r = cli(run_args(cmd, cfg, work_root() / "coarse", lib));
    EXPECT_EQ(r.code, 4) << cmd << ": " << r.err;
  }
}

TEST(Cli, MissingLibraryIsARuntimeFailure)
{
  EXPECT_EQ(cli(run_args("evaluate", testing::default_config_path(), work_root() / "none")).code, 1);
}

std::vector<std::vector<std::string>> read_csv(const std::string & text)
{
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
      cells.emplace_back();
    }
    rows.push_back(cells);
  }
  return rows;
}

TEST(Cli, CompareTable)
{
  const Built & b = built_default();
  const fs::path cfg = config_with("cmp_same", [](json & j) { j["cav"] = j["surrogate"]; });
  const fs::path out = work_root() / "cmp";
  ASSERT_EQ(cli(run_args("compare", cfg, out, "--library " + quoted(b.out / "library.json"))).code,
            0);
  const auto rows = read_csv(read_file(out / "compare.csv"));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"policy", "mu_oracle", "mu_hat", "sigma_sq_oracle",
                                               "required_n", "ratio"}));
  EXPECT_EQ(rows[1][0], "crude");
  EXPECT_EQ(rows[2][0], "greedy");
  EXPECT_EQ(rows[3][0], "epsilon-greedy");
  double best = 0.0;
  std::string best_policy;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i].size(), 6u);
    EXPECT_EQ(rows[i][1], rows[1][1]);
    const double ratio = std::stod(rows[i][5]);
    if (ratio > best) {
      best = ratio;
      best_policy = rows[i][0];
    }
  }
  EXPECT_EQ(best_policy, "greedy");
  EXPECT_EQ(rows[1][5], "1");
}

TEST(Cli, OracleJson)
{
  const Built & b = built_default();
  const fs::path out = work_root() / "oracle";
  ASSERT_EQ(cli(run_args("oracle", b.config, out, "--library " + quoted(b.out / "library.json")))
              .code, 0);
  const json j = json::parse(read_file(out / "oracle.json"));
  EXPECT_EQ(j.at("format_version"), kFormatVersion);
  EXPECT_EQ(j.at("policies").size(), 3u);
  EXPECT_GT(j.at("mu").get<double>(), 0.0);
}

TEST(Cli, SeedOverrideChangesOutputs)
{
  const fs::path cfg = config_with("seeded", [](json & j) { j["ndd"]["sample_count"] = 500; });
  const fs::path a = work_root() / "seed_a";
  const fs::path b = work_root() / "seed_b";
  ASSERT_EQ(cli(run_args("gen-ndd", cfg, a, "--seed 7")).code, 0);
  ASSERT_EQ(cli(run_args("gen-ndd", cfg, b, "--seed 8")).code, 0);
  EXPECT_NE(read_file(a / "ndd.csv"), read_file(b / "ndd.csv"));
  ASSERT_EQ(cli(run_args("gen-ndd", cfg, b, "--seed 7")).code, 0);
  EXPECT_EQ(read_file(a / "ndd.csv"), read_file(b / "ndd.csv"));
}

TEST(Cli, BuildFromSampleCsv)
{
  // samples written by gen-ndd feed build-library and give the same library
  const fs::path out = work_root() / "from_csv";
  ASSERT_EQ(cli(run_args("gen-ndd", testing::default_config_path(), out)).code, 0);
  const fs::path cfg = config_with("from_csv", [&](json & j) {
    j["ndd"]["csv"] = (out / "ndd.csv").string();
  });
  ASSERT_EQ(cli(run_args("build-library", cfg, out)).code, 0);
  EXPECT_EQ(read_file(out / "library.json"), read_file(built_default().out / "library.json"));
}

}  // namespace
}  // namespace scenlib
