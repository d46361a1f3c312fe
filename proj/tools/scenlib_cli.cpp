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


// scenlib: build a critical-scenario library and evaluate a vehicle model
// against it.
//
//   scenlib gen-ndd       --config cfg.json --out run/
//   scenlib build-library --config cfg.json --out run/
//   scenlib evaluate      --config cfg.json --out run/ [--library lib.json]
//   scenlib oracle        --config cfg.json --out run/
//   scenlib compare       --config cfg.json --out run/

#include "scenlib/commands.hpp"

#include <CLI11.hpp>

#include <functional>
#include <string>
#include <vector>

int main(int argc, char ** argv)
{
  CLI::App app{"Critical scenario library generation and accelerated evaluation"};
  app.set_version_flag("--version", std::string(scenlib::kVersion));
  app.require_subcommand(1);

  scenlib::CommandOptions opt;
  std::string config;
  std::string out = ".";
  std::string library;
  std::uint64_t seed = 0;

  struct Entry
  {
    const char * name;
    const char * help;
    std::function<int(const scenlib::CommandOptions &)> run;
    bool takes_library;
  };
  const std::vector<Entry> entries{
    {"gen-ndd", "Write synthetic naturalistic driving samples (CSV)", scenlib::cmd_gen_ndd, false},
    {"build-library", "Fit exposure, search and seed-fill the library", scenlib::cmd_build_library,
     false},
    {"evaluate", "Evaluate the CAV model with the configured policy", scenlib::cmd_evaluate, true},
    {"oracle", "Exact index and per-policy variance on the grid", scenlib::cmd_oracle, true},
    {"compare", "Crude vs greedy vs epsilon-greedy table (CSV)", scenlib::cmd_compare, true},
  };

  std::vector<CLI::App *> subs;
  for (const Entry & e : entries) {
    CLI::App * sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", config, "Experiment config (JSON)")->required();
    sub->add_option("--out", out, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--threads", opt.threads, "Worker threads (never changes results)")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str();
    sub->add_flag("--timings", opt.timings, "Record wall-clock timings in the run manifest");
    if (e.takes_library) {
      sub->add_option("--library", library, "Library file (default: <out>/library.json)");
    }
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : scenlib::exit_code::kConfig;
  }

  opt.config = config;
  opt.out_dir = out;
  if (!library.empty()) {
    opt.library = library;
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (*subs[i]) {
      if (subs[i]->count("--seed") > 0) {
        opt.seed = seed;
      }
      return entries[i].run(opt);
    }
  }
  return scenlib::exit_code::kFailure;
}
