// Copyright 2026 The privsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// privsim: differentially private synthetic images from simulators.
//
//   privsim <command> --config FILE [--seed N] [--out DIR] [--threads N]
//                     [--dry-run] [--axis AXIS]

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "absl/strings/numbers.h"
#include "privsim/cli/commands.h"
#include "privsim/cli/exit_codes.h"

namespace {

// --threads, then SPE_THREADS, then the config.
std::optional<int> ResolveThreads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("SPE_THREADS"); env != nullptr) {
    int n = 0;
    if (absl::SimpleAtoi(env, &n) && n > 0) return n;
    std::cerr << "ignoring SPE_THREADS=" << env << "\n";
  }
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private synthetic data from simulators"};
  app.require_subcommand(1, 1);

  std::string config_path;
  int64_t seed = -1;
  std::string out;
  int threads = 0;
  bool dry_run = false;
  std::string axis;
  bool quiet = false;

  const char* descriptions[] = {
      "Generate datasets from [corpus] sections",
      "Run Private Evolution and write synthetic data, manifest and ledger",
      "Compare histogram baselines with Private Evolution",
      "Run one ablation (schedule-small, schedule-large, alignment)",
      "Render random samples of a parametric backend",
      "Recompute FED and k-NN accuracy of a synthetic dataset",
  };
  const auto& names = privsim::cli::CommandNames();
  for (size_t i = 0; i < names.size(); ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descriptions[i]);
    sub->add_option("--config", config_path, "Config file")->required();
    sub->add_option("--seed", seed, "Override the config seed")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--threads", threads, "Worker threads (or SPE_THREADS)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--dry-run", dry_run, "Validate and report, write nothing");
    sub->add_flag("-q,--quiet", quiet, "No progress output");
    if (names[i] == "ablate") {
      sub->add_option("--axis", axis, "schedule-small, schedule-large or alignment");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : privsim::cli::kExitConfig;
  }

  privsim::cli::CommandOptions options;
  options.config_path = config_path;
  if (seed >= 0) options.overrides.seed = static_cast<uint64_t>(seed);
  if (!out.empty()) options.overrides.out = out;
  options.overrides.threads = ResolveThreads(threads);
  options.dry_run = dry_run;
  options.axis = axis;
  options.log = quiet ? nullptr : &std::cout;

  const std::string verb = app.get_subcommands().front()->get_name();
  const absl::Status status = privsim::cli::DispatchCommand(verb, options);
  if (!status.ok()) {
    std::cerr << "privsim " << verb << ": " << status.message() << "\n";
  }
  return privsim::cli::ExitCodeFor(status);
}
