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

// Experiment configs and everything derived from them before a command
// runs: privacy calibration, backend construction and data loading.
//
//   [run]       seed, n_syn, classes, class_mode, threads, private, test, out
//   [privacy]   epsilon, delta (number or auto), log_base, sigma (number or
//               auto), threshold
//   [schedule]  iterations, backends, alpha.<param>, beta.<param>, gamma
//   [backend.<id>]  type = text | avatar | data, plus type-specific keys
//   [metrics]   knn_k, select_k, epsilon_select, validation_fraction,
//               per_class, selection_report, ridge
//   [baselines] backend, num_clusters
//   [ablate]    axis
//
// Relative paths resolve against the directory of the config file.

#ifndef PRIVSIM_CLI_RUN_CONFIG_H_
#define PRIVSIM_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privsim/core/embedding_matrix.h"
#include "privsim/core/privacy_spec.h"
#include "privsim/core/schedule.h"
#include "privsim/data_backend/corpus.h"
#include "privsim/dp/calibration.h"
#include "privsim/engine/backend_registry.h"
#include "privsim/engine/run_pe.h"
#include "privsim/io/config.h"
#include "privsim/metrics/embedding.h"
#include "privsim/simulators/parametric_backend.h"

namespace privsim::cli {

struct BackendSpec {
  std::string id;
  std::string type;  // text, avatar or data
  double size_lo = 10.0;  // text only
  double size_hi = 30.0;
  std::string corpus_path;  // data only
  bool slice_by_class = false;
  size_t k_max = 0;  // 0: the largest gamma of the schedule
};

absl::StatusOr<std::vector<BackendSpec>> ParseBackends(
    const io::Config& config);

absl::StatusOr<simulators::ParametricBackend> MakeParametricBackend(
    const BackendSpec& spec);

struct PrivacySettings {
  double epsilon = 1.0;
  std::optional<double> delta;  // derived from the private set size if unset
  dp::LogBase log_base = dp::LogBase::kNatural;
  std::optional<double> sigma;  // calibrated if unset
  double threshold = 0.0;
};

struct MetricsSettings {
  int knn_k = 5;
  // Candidate k values for private model selection; empty disables it.
  std::vector<int> select_k;
  double epsilon_select = 0.0;
  double validation_fraction = 0.1;
  bool per_class = false;
  bool selection_report = false;
  double ridge = 1e-6;
  // Dataset scored by the metrics command; <out>/synthetic.spe when empty.
  std::string synthetic_path;
};

struct CommandOverrides {
  std::optional<uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
};

struct Experiment {
  std::string config_hash;
  uint64_t seed = 0;
  size_t n_syn = 0;
  std::vector<int> classes;
  engine::ClassMode class_mode = engine::ClassMode::kAuto;
  int threads = 1;
  std::string private_path;
  std::string test_path;  // optional
  std::string out_dir;
  PrivacySettings privacy;
  IterationSchedule schedule;
  std::vector<BackendSpec> backends;
  MetricsSettings metrics;
  std::string baseline_backend;  // empty: first data backend in the schedule
  size_t baseline_clusters = 100;
  std::string ablate_axis;

  const BackendSpec* FindBackend(const std::string& id) const;
};

// Hash of the canonical config text after overrides were applied.
std::string ConfigHash(const io::Config& config);

// Sections owned by experiment commands, for unknown-key checks.
const std::vector<std::string>& ExperimentSections();

// Applies overrides to `config` (seed is written back so the hash covers it)
// and parses the experiment sections. Unknown keys are errors.
absl::StatusOr<Experiment> ParseExperiment(io::Config& config,
                                           const CommandOverrides& overrides);

// Resolves delta and sigma for `iterations` releases on `num_private` rows.
// Failures are tagged as calibration errors.
absl::StatusOr<PrivacySpec> ResolvePrivacy(const PrivacySettings& settings,
                                           int iterations, size_t num_private,
                                           int num_classes);

struct LabeledEmbeddings {
  EmbeddingMatrix embeddings;
  std::vector<int> labels;  // empty when the file has no labels
};

struct ExperimentData {
  ImageShape shape;
  metrics::PixelEmbedder embedder{ImageShape{}};  // built for `shape`
  engine::PrivateData private_data;  // rows used by the DP mechanism
  LabeledEmbeddings validation;      // held out for model selection
  std::optional<LabeledEmbeddings> test;
};

// Reads and embeds the private and test sets. When model selection is on, a
// seeded validation_fraction of the private rows is held out.
absl::StatusOr<ExperimentData> LoadExperimentData(
    const Experiment& experiment);

// Reads a corpus tensor file, embeds it and builds (or reuses from
// `cache_dir`) its k-NN table.
absl::StatusOr<data_backend::Corpus> LoadCorpus(
    const std::string& path, size_t k_max, ImageShape expected_shape,
    const metrics::PixelEmbedder& embedder, int threads,
    const std::string& cache_dir);

absl::StatusOr<engine::DataSource> MakeDataSource(
    const BackendSpec& spec, data_backend::Corpus corpus,
    const std::vector<int>& classes, int threads);

size_t EffectiveKMax(const BackendSpec& spec, const IterationSchedule& schedule);

// Neighbor tables of a corpus file are cached here when caching is on.
std::string KnnCacheDir(const std::string& corpus_path);

// Every backend named by the schedule, checked against the private shape.
// Data backends listed in `prebuilt` use that corpus instead of their file.
absl::StatusOr<engine::BackendRegistry> BuildRegistry(
    const Experiment& experiment, ImageShape shape,
    const metrics::PixelEmbedder& embedder, bool use_cache,
    const std::map<std::string, const data_backend::Corpus*>& prebuilt = {});

engine::RunConfig MakeRunConfig(const Experiment& experiment,
                                const PrivacySpec& privacy);

}  // namespace privsim::cli

#endif  // PRIVSIM_CLI_RUN_CONFIG_H_
