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

#ifndef SCENLIB__COMMANDS_HPP_
#define SCENLIB__COMMANDS_HPP_

// Entry points behind the `scenlib` command-line tool. Each command returns
// a process exit code:
//   0 success, 1 runtime failure, 2 config error, 3 empty library,
//   4 input mismatch (library grid differs from the config grid).

#include "scenlib/config.hpp"
#include "scenlib/dynamics.hpp"
#include "scenlib/evaluation.hpp"
#include "scenlib/exposure.hpp"
#include "scenlib/io.hpp"
#include "scenlib/library.hpp"
#include "scenlib/oracle.hpp"
#include "scenlib/random.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace scenlib
{

inline constexpr std::string_view kVersion = "1.0.0";

namespace exit_code
{
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kConfig = 2;
inline constexpr int kEmptyLibrary = 3;
inline constexpr int kMismatch = 4;
}  // namespace exit_code

struct CommandOptions
{
  std::filesystem::path config;
  std::filesystem::path out_dir{"."};
  std::optional<std::filesystem::path> library;  // default: <out>/<outputs.library>
  std::optional<std::uint64_t> seed;             // overrides the config seed
  unsigned threads{1};
  bool timings{false};                            // add wall-clock timings to the manifest
  std::ostream * log{&std::cerr};
};

namespace detail
{

class InputMismatch : public Error
{
public:
  using Error::Error;
};

class EmptyLibraryError : public Error
{
public:
  using Error::Error;
};

struct Context
{
  ExperimentConfig config;
  std::string config_bytes;
  std::string config_hash;
  ScenarioGrid grid;
};

inline Context load_context(const CommandOptions & opt)
{
  Context ctx;
  try {
    ctx.config_bytes = read_file(opt.config);
  } catch (const Error & e) {
    throw ConfigError(e.what());
  }
  ctx.config = parse_config(ctx.config_bytes);
  if (opt.seed) {
    ctx.config.apply_seed(*opt.seed);
  }
  std::string hashed = ctx.config_bytes;
  hashed += "\nseed=" + std::to_string(ctx.config.seed);
  ctx.config_hash = digest(hashed);
  ctx.grid = build_grid(ctx.config.odd);
  return ctx;
}

inline std::filesystem::path resolve_input(
  const CommandOptions & opt, const std::filesystem::path & p)
{
  if (p.is_absolute()) {
    return p;
  }
  return opt.config.parent_path() / p;
}

inline std::filesystem::path library_path(const CommandOptions & opt, const Context & ctx)
{
  return opt.library ? *opt.library : opt.out_dir / ctx.config.outputs.library;
}

/// Run manifest: digests of every input and output so a rerun can be checked
/// byte for byte. Timings are included only on request to keep reruns identical.
class Manifest
{
public:
  Manifest(std::string command, const Context & ctx)
  : command_(std::move(command)), start_(std::chrono::steady_clock::now())
  {
    doc_ = {{"format_version", kFormatVersion}, {"kind", "run-manifest"},
            {"command", command_}, {"artifact_version", std::string(kVersion)},
            {"config_hash", ctx.config_hash}, {"seed", ctx.config.seed},
            {"inputs", json::object()}, {"outputs", json::object()}};
  }

  void input(const std::string & name, std::string_view bytes) { doc_["inputs"][name] = digest(bytes); }
  void output(const std::string & name, std::string_view bytes) { doc_["outputs"][name] = digest(bytes); }
  void timing(const std::string & phase, double seconds) { timings_[phase] = seconds; }

  void write(const CommandOptions & opt)
  {
    if (opt.timings) {
      timings_["total"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
      doc_["timings_s"] = timings_;
    }
    write_file(opt.out_dir / (command_ + ".manifest.json"), dump(doc_));
  }

private:
  std::string command_;
  std::chrono::steady_clock::time_point start_;
  json doc_;
  std::map<std::string, double> timings_;
};

inline void emit(Manifest & m, const CommandOptions & opt, const std::string & file,
                 const std::string & bytes)
{
  write_file(opt.out_dir / file, bytes);
  m.output(file, bytes);
}

inline std::vector<Sample> obtain_samples(
  const CommandOptions & opt, const Context & ctx, Manifest & m)
{
  if (ctx.config.ndd_csv) {
    const std::filesystem::path p = resolve_input(opt, *ctx.config.ndd_csv);
    const std::string bytes = read_file(p);
    m.input(p.filename().string(), bytes);
    return samples_from_csv(bytes);
  }
  return synthesize_ndd(ctx.config.ndd, ctx.grid);
}

inline Library load_matching_library(
  const CommandOptions & opt, const Context & ctx, Manifest & m, std::string & lib_hash)
{
  const std::filesystem::path p = library_path(opt, ctx);
  const std::string bytes = read_file(p);
  m.input("library", bytes);
  lib_hash = digest(bytes);
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error & ex) {
    throw FormatError(p.string() + ": " + ex.what());
  }
  Library lib = library_from_json(j);
  if (!(lib.grid() == ctx.grid)) {
    throw InputMismatch("library grid does not match the config grid");
  }
  return lib;
}

struct PolicyChoice
{
  SamplingPolicy policy;
  EpsilonChoice epsilon;
};

inline PolicyChoice make_policy(PolicyKind kind, const Library & lib, const EvaluationSettings & ev)
{
  PolicyChoice c;
  switch (kind) {
    case PolicyKind::Crude:
      c.policy = crude_policy(lib.exposure);
      break;
    case PolicyKind::Greedy:
      if (!(lib.w > 0.0)) {
        throw EmptyLibraryError("library is empty");
      }
      c.policy = greedy_policy(lib);
      break;
    case PolicyKind::EpsilonGreedy:
      if (!(lib.w > 0.0)) {
        throw EmptyLibraryError("library is empty");
      }
      if (ev.epsilon) {
        c.epsilon.epsilon = c.epsilon.raw = *ev.epsilon;
      } else {
        c.epsilon = choose_epsilon(lib.w, lib.field.mu_s, ev.eps_min, ev.eps_max);
      }
      c.policy = epsilon_greedy_policy(lib, c.epsilon.epsilon);
      break;
  }
  return c;
}

inline EvaluationReport run_policy(
  const PolicyChoice & choice, const Library & lib, const Context & ctx, unsigned threads)
{
  const auto & ev = ctx.config.evaluation;
  EvaluationReport r;
  if (choice.policy.kind == PolicyKind::Crude) {
    r = crude_mc_estimate(lib.exposure, ctx.config.cav, ctx.config.odd, ev.n_tests,
                          derive_seed(ctx.config.seed, stream::kCrude), ev.alpha, ev.beta,
                          ev.replications_per_test, threads);
  } else {
    r = evaluate_policy(choice.policy, lib.exposure, ctx.config.cav, ctx.config.odd, ev.n_tests,
                        derive_seed(ctx.config.seed, stream::kEvaluation), ev.alpha, ev.beta,
                        ev.replications_per_test, threads)
          .report;
    r.epsilon_raw = choice.epsilon.raw;
    r.epsilon_clamped = choice.epsilon.clamped;
    r.epsilon_notice = choice.epsilon.notice;
  }
  return r;
}

inline ChallengeField cav_field(const Context & ctx, unsigned threads)
{
  return exhaustive_field(ctx.config.cav, ctx.grid, ctx.config.odd, ctx.config.cav_replications,
                          derive_seed(ctx.config.seed, stream::kCavField), threads);
}

inline VarianceMode variance_mode(const ExperimentConfig & cfg)
{
  return cfg.cav.deterministic() ? VarianceMode::Deterministic : VarianceMode::Bernoulli;
}

template <class Body>
int guarded(const CommandOptions & opt, Body && body)
{
  try {
    return body();
  } catch (const ConfigError & e) {
    *opt.log << "error: " << e.what() << "\n";
    return exit_code::kConfig;
  } catch (const InvalidConfig & e) {
    *opt.log << "error: config: " << e.what() << "\n";
    return exit_code::kConfig;
  } catch (const EmptyLibraryError & e) {
    *opt.log << "error: " << e.what() << "\n";
    return exit_code::kEmptyLibrary;
  } catch (const InputMismatch & e) {
    *opt.log << "error: " << e.what() << "\n";
    return exit_code::kMismatch;
  } catch (const std::exception & e) {
    *opt.log << "error: " << e.what() << "\n";
    return exit_code::kFailure;
  }
}

}  // namespace detail

/// Writes the synthetic naturalistic-driving samples as CSV.
inline int cmd_gen_ndd(const CommandOptions & opt)
{
  return detail::guarded(opt, [&] {
    const detail::Context ctx = detail::load_context(opt);
    detail::Manifest m("gen-ndd", ctx);
    const std::vector<Sample> samples = synthesize_ndd(ctx.config.ndd, ctx.grid);
    detail::emit(m, opt, ctx.config.outputs.ndd_csv, samples_to_csv(samples));
    m.write(opt);
    *opt.log << "wrote " << samples.size() << " samples to "
             << (opt.out_dir / ctx.config.outputs.ndd_csv).string() << "\n";
    return exit_code::kOk;
  });
}

/// Exposure histogram, surrogate challenge field, criticality, search and
/// seed-fill; writes the library and its completeness report.
inline int cmd_build_library(const CommandOptions & opt)
{
  return detail::guarded(opt, [&] {
    const detail::Context ctx = detail::load_context(opt);
    const ExperimentConfig & cfg = ctx.config;
    detail::Manifest m("build-library", ctx);

    auto t0 = std::chrono::steady_clock::now();
    const std::vector<Sample> samples = detail::obtain_samples(opt, ctx, m);
    const ExposureModel exposure = fit_histogram(ctx.grid, samples, cfg.zone_mass_target);
    const ChallengeField challenge =
      exhaustive_field(cfg.surrogate, ctx.grid, cfg.odd, cfg.surrogate_replications,
                       derive_seed(cfg.seed, stream::kSurrogateField), opt.threads);
    auto t1 = std::chrono::steady_clock::now();
    m.timing("fields", std::chrono::duration<double>(t1 - t0).count());

    const LibraryResult result = generate_library(
      challenge, exposure, cfg.search, cfg.m_factor, cfg.surrogate, cfg.odd,
      GenerateOptions{true, true, opt.threads});
    m.timing("search", std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count());

    const Library & lib = result.library;
    if (exposure.out_of_bounds > 0) {
      *opt.log << "note: " << exposure.out_of_bounds << " exposure samples out of bounds\n";
    }
    if (lib.field.mu_s == 0.0) {
      *opt.log << "error: surrogate has zero challenge everywhere (mu_S = 0)\n";
      return exit_code::kEmptyLibrary;
    }
    detail::emit(m, opt, cfg.outputs.library, dump(to_json(lib)));
    detail::emit(m, opt, cfg.outputs.completeness, dump(to_json(result.report)));
    m.write(opt);

    *opt.log << "library: " << lib.member_count() << " of " << ctx.grid.total_cells()
             << " cells, gamma=" << format_double(lib.gamma) << " W=" << format_double(lib.w)
             << " mu_S=" << format_double(lib.field.mu_s) << ", missed "
             << result.report.missed.size() << "\n";
    for (const auto & w : result.report.warnings) {
      *opt.log << "warning: " << w << "\n";
    }
    return lib.member_count() == 0 ? exit_code::kEmptyLibrary : exit_code::kOk;
  });
}

/// Samples scenarios with the configured policy, tests the CAV model and
/// writes the evaluation report.
inline int cmd_evaluate(const CommandOptions & opt)
{
  return detail::guarded(opt, [&] {
    const detail::Context ctx = detail::load_context(opt);
    detail::Manifest m("evaluate", ctx);
    std::string lib_hash;
    const Library lib = detail::load_matching_library(opt, ctx, m, lib_hash);

    const detail::PolicyChoice choice =
      detail::make_policy(ctx.config.evaluation.policy, lib, ctx.config.evaluation);
    EvaluationReport r = detail::run_policy(choice, lib, ctx, opt.threads);
    r.config_hash = ctx.config_hash;
    r.library_hash = lib_hash;
    detail::emit(m, opt, ctx.config.outputs.evaluation, dump(to_json(r)));
    m.write(opt);

    *opt.log << r.policy << ": mu_hat=" << format_double(r.mu_hat)
             << " sigma_sq_hat=" << format_double(r.sigma_sq_hat) << " n=" << r.n << "\n";
    if (!r.epsilon_notice.empty()) {
      *opt.log << "note: " << r.epsilon_notice << "\n";
    }
    return exit_code::kOk;
  });
}

/// Exact index, variances and biases of the three policies for the CAV.
inline int cmd_oracle(const CommandOptions & opt)
{
  return detail::guarded(opt, [&] {
    const detail::Context ctx = detail::load_context(opt);
    detail::Manifest m("oracle", ctx);
    std::string lib_hash;
    const Library lib = detail::load_matching_library(opt, ctx, m, lib_hash);

    std::vector<SamplingPolicy> policies{crude_policy(lib.exposure)};
    if (lib.w > 0.0) {
      policies.push_back(greedy_policy(lib));
      policies.push_back(
        detail::make_policy(PolicyKind::EpsilonGreedy, lib, ctx.config.evaluation).policy);
    }
    const ChallengeField f_a = detail::cav_field(ctx, opt.threads);
    const OracleResult r = compute_oracle(f_a, lib, policies, detail::variance_mode(ctx.config));
    detail::emit(m, opt, ctx.config.outputs.oracle, dump(to_json(r)));
    m.write(opt);
    *opt.log << "oracle: mu=" << format_double(r.mu) << " mu_S=" << format_double(r.mu_s) << "\n";
    return exit_code::kOk;
  });
}

inline constexpr std::string_view kCompareHeader =
  "policy,mu_oracle,mu_hat,sigma_sq_oracle,required_n,ratio";

/// Crude, greedy and epsilon-greedy side by side: oracle index and variance,
/// an estimate from n_tests tests, the required test count and the saving
/// relative to crude Monte Carlo.
inline int cmd_compare(const CommandOptions & opt)
{
  return detail::guarded(opt, [&] {
    const detail::Context ctx = detail::load_context(opt);
    detail::Manifest m("compare", ctx);
    std::string lib_hash;
    const Library lib = detail::load_matching_library(opt, ctx, m, lib_hash);
    const auto & ev = ctx.config.evaluation;

    const ChallengeField f_a = detail::cav_field(ctx, opt.threads);
    const double mu = exact_index(f_a, lib.exposure);
    const double z = z_for_alpha(ev.alpha);

    struct Row
    {
      std::string name;
      double mu_hat;
      double sigma_sq;
      std::optional<std::size_t> required;
    };
    std::vector<Row> rows;
    for (PolicyKind kind : {PolicyKind::Crude, PolicyKind::Greedy, PolicyKind::EpsilonGreedy}) {
      const detail::PolicyChoice choice = detail::make_policy(kind, lib, ev);
      const EvaluationReport r = detail::run_policy(choice, lib, ctx, opt.threads);
      const EstimatorMoments mom = estimator_moments(f_a.value, lib.exposure.mass, choice.policy.q,
                                                     detail::variance_mode(ctx.config));
      Row row{std::string(to_string(kind)), r.mu_hat, mom.variance, std::nullopt};
      if (mu > 0.0) {
        row.required = required_tests(z, ev.beta, mu, mom.variance);
      }
      rows.push_back(row);
    }

    std::string csv(kCompareHeader);
    csv += '\n';
    const auto & crude = rows.front();
    for (const Row & row : rows) {
      csv += row.name + ',' + format_double(mu) + ',' + format_double(row.mu_hat) + ',' +
             format_double(row.sigma_sq) + ',';
      if (row.required) {
        csv += std::to_string(*row.required) + ',' +
               format_double(static_cast<double>(*crude.required) /
                             static_cast<double>(*row.required));
      } else {
        csv += ',';
      }
      csv += '\n';
    }
    detail::emit(m, opt, ctx.config.outputs.compare, csv);
    m.write(opt);
    *opt.log << csv;
    return exit_code::kOk;
  });
}

}  // namespace scenlib

#endif  // SCENLIB__COMMANDS_HPP_
