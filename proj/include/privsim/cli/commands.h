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

// Command implementations behind the privsim binary. Each command reads one
// config file, writes its outputs and returns a status that ExitCodeFor maps
// to the process exit code.

#ifndef PRIVSIM_CLI_COMMANDS_H_
#define PRIVSIM_CLI_COMMANDS_H_

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "privsim/cli/run_config.h"

namespace privsim::cli {

inline constexpr char kSyntheticFile[] = "synthetic.spe";
inline constexpr char kManifestFile[] = "manifest.csv";
inline constexpr char kLedgerFile[] = "ledger.txt";
inline constexpr char kBaselinesFile[] = "baselines.csv";
inline constexpr char kSelectionReportFile[] = "selection_report.csv";
inline constexpr char kMetricsFile[] = "metrics.csv";

struct CommandOptions {
  std::string config_path;
  CommandOverrides overrides;
  bool dry_run = false;
  std::string axis;  // ablate only; falls back to [ablate] axis
  std::ostream* log = nullptr;  // progress output; nullptr discards it
};

// Writes every [corpus] / [corpus.<name>] dataset of the config.
absl::Status GenCorpusCommand(const CommandOptions& options);
// PE end to end: <out>/synthetic.spe, manifest.csv, ledger.txt.
absl::Status RunCommand(const CommandOptions& options);
// Direct histogram, cluster histogram and PE at the same (epsilon, delta):
// <out>/baselines.csv.
absl::Status BaselinesCommand(const CommandOptions& options);
// schedule-small, schedule-large or alignment, under <out>/<axis>/.
absl::Status AblateCommand(const CommandOptions& options);
// Random samples of one parametric backend as a tensor file.
absl::Status RenderPreviewCommand(const CommandOptions& options);
// FED and k-NN accuracy of an existing synthetic file: <out>/metrics.csv.
absl::Status MetricsCommand(const CommandOptions& options);

absl::Status DispatchCommand(std::string_view verb,
                             const CommandOptions& options);
const std::vector<std::string>& CommandNames();

// Header fields every run manifest carries.
const std::vector<std::string>& RequiredManifestFields();
// Fails unless every required "# key=value" header line is present and
// non-empty and a CSV header row follows.
absl::Status CheckManifest(std::string_view text);

}  // namespace privsim::cli

#endif  // PRIVSIM_CLI_COMMANDS_H_
