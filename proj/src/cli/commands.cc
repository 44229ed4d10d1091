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

#include "privsim/cli/commands.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "privsim/cli/fixtures.h"
#include "privsim/core/rng.h"
#include "privsim/core/status_macros.h"
#include "privsim/data_backend/baselines.h"
#include "privsim/dp/calibration.h"
#include "privsim/engine/run_pe.h"
#include "privsim/io/csv.h"
#include "privsim/io/tensor_file.h"
#include "privsim/metrics/classifier.h"
#include "privsim/metrics/frechet.h"
#include "privsim/metrics/selection_report.h"
#include "privsim/metrics/summary.h"

namespace privsim::cli {
namespace {

namespace fs = std::filesystem;
using io::FormatNumber;

class NullBuffer : public std::streambuf {
 protected:
  int overflow(int c) override { return c; }
};

std::ostream& LogOf(const CommandOptions& options) {
  static NullBuffer buffer;
  static std::ostream null_stream(&buffer);
  return options.log != nullptr ? *options.log : null_stream;
}

std::string PathIn(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::string Optional(std::optional<double> v) {
  return v.has_value() ? FormatNumber(*v) : "-";
}

// "# key=value" lines followed by a CSV table.
class Manifest {
 public:
  explicit Manifest(std::vector<std::string> columns)
      : table_(std::move(columns)) {}

  void Set(const std::string& key, const std::string& value) {
    fields_.emplace_back(key, value);
  }
  io::CsvTable& table() { return table_; }

  std::string ToString() const {
    std::string out;
    for (const auto& [key, value] : fields_) {
      absl::StrAppend(&out, "# ", key, "=", value, "\n");
    }
    return out + table_.ToString();
  }

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
  io::CsvTable table_;
};

std::string JoinDoubles(const std::vector<double>& v) {
  std::vector<std::string> parts;
  for (double d : v) parts.push_back(FormatNumber(d));
  return absl::StrJoin(parts, " ");
}

void AddExperimentFields(Manifest& m, const std::string& command,
                         const Experiment& ex, const PrivacySpec& privacy,
                         size_t num_private) {
  m.Set("command", command);
  m.Set("epsilon", FormatNumber(privacy.epsilon));
  m.Set("delta", FormatNumber(privacy.delta));
  m.Set("sigma", FormatNumber(privacy.sigma));
  m.Set("sigma_calibrated", privacy.sigma_calibrated ? "true" : "false");
  m.Set("iterations", absl::StrCat(privacy.iterations));
  m.Set("threshold", FormatNumber(privacy.threshold));
  m.Set("seed", absl::StrCat(ex.seed));
  m.Set("config_hash", ex.config_hash);
  m.Set("num_private", absl::StrCat(num_private));
  m.Set("n_syn", absl::StrCat(ex.n_syn));
  m.Set("classes",
        ex.classes.empty() ? "none" : absl::StrJoin(ex.classes, " "));
  m.Set("backends", absl::StrJoin(ex.schedule.backend_ids, " "));
  for (const auto& [param, values] : ex.schedule.alpha) {
    m.Set(absl::StrCat("alpha.", param), JoinDoubles(values));
  }
  for (const auto& [param, values] : ex.schedule.beta) {
    m.Set(absl::StrCat("beta.", param), JoinDoubles(values));
  }
  if (!ex.schedule.gamma.empty()) {
    m.Set("gamma", absl::StrJoin(ex.schedule.gamma, " "));
  }
  m.Set("embedding", absl::StrCat("pixel16-v", metrics::PixelEmbedder::kVersion));
}

// Scores synthetic embeddings against the private set (FED) and the test
// set (k-NN accuracy).
class Evaluator {
 public:
  static absl::StatusOr<Evaluator> Create(const Experiment& ex,
                                          const ExperimentData& data) {
    Evaluator e;
    e.data_ = &data;
    e.k_ = ex.metrics.knn_k;
    e.threads_ = ex.threads;
    e.ridge_ = ex.metrics.ridge;
    const EmbeddingMatrix& priv = data.private_data.embeddings;
    if (priv.rows() >= 2) {
      ASSIGN_OR_RETURN(auto ref,
                       metrics::FrechetReference::Create(priv, e.ridge_));
      e.all_.emplace(std::move(ref));
    }
    if (ex.metrics.per_class) {
      for (int c : ex.classes) {
        EmbeddingMatrix rows = data.private_data.ForClass(c);
        if (rows.rows() < 2) continue;
        ASSIGN_OR_RETURN(auto ref,
                         metrics::FrechetReference::Create(rows, e.ridge_));
        e.per_class_.emplace(c, std::move(ref));
      }
    }
    return e;
  }

  // Absent with fewer than two synthetic rows.
  absl::StatusOr<std::optional<double>> Fed(
      const EmbeddingMatrix& synthetic, std::optional<int> class_id = {}) const {
    const metrics::FrechetReference* ref = nullptr;
    if (class_id.has_value()) {
      auto it = per_class_.find(*class_id);
      if (it != per_class_.end()) ref = &it->second;
    } else if (all_.has_value()) {
      ref = &*all_;
    }
    if (ref == nullptr || synthetic.rows() < 2) return std::optional<double>();
    ASSIGN_OR_RETURN(double d, ref->Distance(synthetic));
    return std::optional<double>(d);
  }

  // Absent without labeled synthetic rows or a labeled test set. With
  // `class_id` only test rows of that class are scored.
  absl::StatusOr<std::optional<double>> Accuracy(
      const EmbeddingMatrix& train, std::span<const int> labels,
      std::optional<int> class_id = {}, std::optional<int> k = {}) const {
    if (!data_->test.has_value() || data_->test->labels.empty() ||
        labels.empty() || labels.size() != train.rows()) {
      return std::optional<double>();
    }
    const LabeledEmbeddings& test = *data_->test;
    return Score(train, labels, test.embeddings, test.labels, class_id,
                 k.value_or(k_));
  }

  absl::StatusOr<std::optional<double>> Score(
      const EmbeddingMatrix& train, std::span<const int> labels,
      const EmbeddingMatrix& eval, std::span<const int> eval_labels,
      std::optional<int> class_id, int k) const {
    // k-NN needs k <= |train|; shrink to the largest odd value that fits.
    int k_eff = static_cast<int>(
        std::min<size_t>(static_cast<size_t>(k), train.rows()));
    if (k_eff % 2 == 0) --k_eff;
    if (k_eff < 1) return std::optional<double>();
    if (!class_id.has_value()) {
      ASSIGN_OR_RETURN(double acc,
                       metrics::NnClassifierAccuracy(train, labels, eval,
                                                     eval_labels, k_eff,
                                                     threads_));
      return std::optional<double>(acc);
    }
    EmbeddingMatrix rows(0, eval.dim());
    std::vector<int> row_labels;
    for (size_t i = 0; i < eval.rows(); ++i) {
      if (eval_labels[i] != *class_id) continue;
      rows.AppendRow(eval.row(i));
      row_labels.push_back(eval_labels[i]);
    }
    if (rows.rows() == 0) return std::optional<double>();
    ASSIGN_OR_RETURN(double acc,
                     metrics::NnClassifierAccuracy(train, labels, rows,
                                                   row_labels, k_eff, threads_));
    return std::optional<double>(acc);
  }

 private:
  const ExperimentData* data_ = nullptr;
  int k_ = 5;
  int threads_ = 1;
  double ridge_ = metrics::kDefaultRidge;
  std::optional<metrics::FrechetReference> all_;
  std::map<int, metrics::FrechetReference> per_class_;
};

struct MetricRow {
  int iteration = 0;
  std::string label;  // "all" or the class id
  std::optional<double> fed;
  std::optional<double> accuracy;
  std::optional<double> entropy;
  size_t unique = 0;
};

struct Flattened {
  EmbeddingMatrix embeddings;
  std::vector<int> labels;  // empty when any sample is unlabeled
  std::vector<Sample> samples;
  std::vector<double> distribution;
};

Flattened Flatten(std::span<const engine::IterationRecord> records,
                  size_t dim) {
  Flattened f;
  f.embeddings = EmbeddingMatrix(0, dim);
  bool labeled = true;
  for (const engine::IterationRecord& r : records) {
    for (size_t i = 0; i < r.embeddings.rows(); ++i) {
      f.embeddings.AppendRow(r.embeddings.row(i));
    }
    for (const Sample& s : r.population) {
      f.samples.push_back(s);
      if (s.label.has_value()) {
        f.labels.push_back(*s.label);
      } else {
        labeled = false;
      }
    }
    f.distribution.insert(f.distribution.end(), r.distribution.begin(),
                          r.distribution.end());
  }
  if (!labeled) f.labels.clear();
  return f;
}

struct PeRun {
  engine::RunResult result;
  std::vector<MetricRow> rows;
  std::optional<double> final_fed;
  std::optional<double> final_accuracy;
  Flattened final_population;
};

absl::StatusOr<PeRun> ExecutePe(const Experiment& ex,
                                const ExperimentData& data,
                                const PrivacySpec& privacy,
                                const engine::BackendRegistry& registry,
                                const Evaluator& eval, bool keep_trace,
                                std::ostream& log) {
  PeRun run;
  const size_t dim = metrics::PixelEmbedder::kDim;
  engine::RunOptions options;
  options.keep_trace = keep_trace;
  options.observer =
      [&](int t,
          std::span<const engine::IterationRecord> records) -> absl::Status {
    Flattened f = Flatten(records, dim);
    MetricRow row;
    row.iteration = t;
    row.label = "all";
    ASSIGN_OR_RETURN(row.fed, eval.Fed(f.embeddings));
    ASSIGN_OR_RETURN(row.accuracy, eval.Accuracy(f.embeddings, f.labels));
    if (t > 0) row.entropy = metrics::HistogramEntropy(f.distribution);
    row.unique = metrics::UniqueSampleCount(f.samples);
    run.rows.push_back(row);
    log << "iteration " << t << ": FED " << Optional(row.fed)
        << ", k-NN accuracy " << Optional(row.accuracy) << ", unique "
        << row.unique << "\n";
    if (ex.metrics.per_class) {
      for (const engine::IterationRecord& r : records) {
        if (!r.label.has_value()) continue;
        MetricRow c;
        c.iteration = t;
        c.label = absl::StrCat(*r.label);
        ASSIGN_OR_RETURN(c.fed, eval.Fed(r.embeddings, *r.label));
        ASSIGN_OR_RETURN(c.accuracy,
                         eval.Accuracy(f.embeddings, f.labels, *r.label));
        if (t > 0) c.entropy = metrics::HistogramEntropy(r.distribution);
        c.unique = metrics::UniqueSampleCount(r.population);
        run.rows.push_back(c);
      }
    }
    if (t == ex.schedule.iterations) {
      run.final_fed = row.fed;
      run.final_accuracy = row.accuracy;
      run.final_population = std::move(f);
    }
    return absl::OkStatus();
  };
  ASSIGN_OR_RETURN(run.result,
                   engine::RunPe(MakeRunConfig(ex, privacy), registry,
                                 data.private_data, data.embedder, options));
  return run;
}

struct ModelSelection {
  int k = 0;
  double validation_accuracy = 0.0;
  std::optional<double> test_accuracy;
};

// Picks the k-NN neighbor count on the held-out private rows with Report
// Noisy Max.
absl::StatusOr<std::optional<ModelSelection>> SelectModel(
    const Experiment& ex, const ExperimentData& data, const Evaluator& eval,
    const Flattened& synthetic) {
  if (ex.metrics.select_k.empty()) return std::optional<ModelSelection>();
  if (synthetic.labels.empty()) {
    return absl::InvalidArgumentError(
        "model selection needs a labeled (conditional) run");
  }
  std::vector<metrics::ModelCandidate> candidates;
  for (int k : ex.metrics.select_k) {
    ASSIGN_OR_RETURN(std::optional<double> acc,
                     eval.Score(synthetic.embeddings, synthetic.labels,
                                data.validation.embeddings,
                                data.validation.labels, std::nullopt, k));
    candidates.push_back({absl::StrCat("k=", k), acc.value_or(0.0)});
  }
  RngStream rng = RngStream(ex.seed).Substream("cli", "select");
  ASSIGN_OR_RETURN(size_t chosen,
                   metrics::DpModelSelect(candidates,
                                          data.validation.embeddings.rows(),
                                          ex.metrics.epsilon_select, rng));
  ModelSelection sel;
  sel.k = ex.metrics.select_k[chosen];
  sel.validation_accuracy = candidates[chosen].validation_accuracy;
  ASSIGN_OR_RETURN(sel.test_accuracy,
                   eval.Accuracy(synthetic.embeddings, synthetic.labels,
                                 std::nullopt, sel.k));
  return std::optional<ModelSelection>(sel);
}

std::string LedgerText(const Experiment& ex, const PrivacySpec& privacy,
                       size_t num_private, const engine::GenerationTrace& trace,
                       const std::optional<ModelSelection>& selection) {
  const bool holds =
      privacy.sigma > 0.0 &&
      dp::AnalyticGaussianHolds(privacy.epsilon, privacy.delta, privacy.sigma,
                                std::sqrt(static_cast<double>(
                                    privacy.iterations)));
  std::vector<std::string> releases;
  for (int n : trace.noise_applications) releases.push_back(absl::StrCat(n));
  std::string out = absl::StrCat(
      "mechanism = gaussian nearest-neighbor histogram\n",
      "sensitivity = 1\n", "epsilon = ", FormatNumber(privacy.epsilon), "\n",
      "delta = ", FormatNumber(privacy.delta), "\n",
      "delta_source = ", ex.privacy.delta.has_value() ? "config" : "auto", "\n",
      "sigma = ", FormatNumber(privacy.sigma), "\n",
      "sigma_source = ", privacy.sigma_calibrated ? "calibrated" : "config",
      "\n", "guarantee = ", holds ? "holds" : "none", "\n",
      "iterations = ", privacy.iterations, "\n",
      "threshold = ", FormatNumber(privacy.threshold), "\n",
      "num_private = ", num_private, "\n",
      "num_groups = ", trace.noise_applications.size(), "\n",
      "releases_per_group = ", absl::StrJoin(releases, " "), "\n",
      "seed = ", ex.seed, "\n", "config_hash = ", ex.config_hash, "\n");
  if (selection.has_value()) {
    absl::StrAppend(&out, "model_selection_epsilon = ",
                    FormatNumber(ex.metrics.epsilon_select), "\n",
                    "model_selection_candidates = ",
                    absl::StrJoin(ex.metrics.select_k, " "), "\n");
  }
  return out;
}

// Runs PE and writes synthetic.spe, manifest.csv and ledger.txt to out_dir.
absl::StatusOr<PeRun> RunAndWrite(
    const Experiment& ex, const ExperimentData& data,
    const PrivacySpec& privacy, const engine::BackendRegistry& registry,
    const std::string& out_dir, const std::string& command,
    const std::vector<std::pair<std::string, std::string>>& extra_fields,
    std::ostream& log) {
  ASSIGN_OR_RETURN(Evaluator eval, Evaluator::Create(ex, data));
  const bool keep_trace = ex.metrics.selection_report;
  ASSIGN_OR_RETURN(PeRun run,
                   ExecutePe(ex, data, privacy, registry, eval, keep_trace, log));
  for (size_t g = 0; g < run.result.trace.noise_applications.size(); ++g) {
    if (run.result.trace.noise_applications[g] != privacy.iterations) {
      return absl::InternalError(absl::StrCat(
          "group ", g, " released ", run.result.trace.noise_applications[g],
          " histograms, expected ", privacy.iterations));
    }
  }
  ASSIGN_OR_RETURN(std::optional<ModelSelection> selection,
                   SelectModel(ex, data, eval, run.final_population));

  const size_t num_private = data.private_data.embeddings.rows();
  Manifest manifest({"iteration", "class", "fed", "knn_accuracy",
                     "histogram_entropy", "unique_sample_count"});
  AddExperimentFields(manifest, command, ex, privacy, num_private);
  for (const auto& [key, value] : extra_fields) manifest.Set(key, value);
  if (selection.has_value()) {
    manifest.Set("selected_k", absl::StrCat(selection->k));
    manifest.Set("selected_k_test_accuracy",
                 selection->test_accuracy.has_value()
                     ? FormatNumber(*selection->test_accuracy)
                     : "");
  }
  for (const MetricRow& r : run.rows) {
    manifest.table()
        .AddRow()
        .Add(r.iteration)
        .Add(r.label)
        .Add(r.fed)
        .Add(r.accuracy)
        .Add(r.entropy)
        .Add(r.unique);
  }

  ASSIGN_OR_RETURN(io::TensorData tensor,
                   io::TensorFromSamples(run.result.synthetic));
  RETURN_IF_ERROR(io::WriteTensorFile(
      PathIn(out_dir, kSyntheticFile), tensor,
      absl::StrCat(command, " config=", ex.config_hash, " seed=", ex.seed)));
  const std::string manifest_text = manifest.ToString();
  RETURN_IF_ERROR(CheckManifest(manifest_text));
  RETURN_IF_ERROR(
      io::WriteFileBytes(PathIn(out_dir, kManifestFile), manifest_text));
  RETURN_IF_ERROR(io::WriteFileBytes(
      PathIn(out_dir, kLedgerFile),
      LedgerText(ex, privacy, num_private, run.result.trace, selection)));

  if (ex.metrics.selection_report) {
    const std::string& id = ex.schedule.backend_ids.back();
    auto source = registry.Data(id);
    if (!source.ok()) {
      return absl::InvalidArgumentError(
          "selection_report needs a data backend in the last iteration");
    }
    const size_t gamma =
        static_cast<size_t>(ex.schedule.GammaAt(ex.schedule.iterations));
    ASSIGN_OR_RETURN(std::vector<metrics::SelectionReportRow> report,
                     metrics::SelectedVsUnselectedReport(
                         run.result.trace, **source,
                         data.private_data.embeddings, gamma, ex.metrics.ridge));
    io::CsvTable table({"iteration", "num_selected", "num_unselected",
                        "fed_selected", "fed_unselected"});
    for (const auto& r : report) {
      table.AddRow()
          .Add(r.iteration)
          .Add(r.num_selected)
          .Add(r.num_unselected)
          .Add(r.fed_selected)
          .Add(r.fed_unselected);
    }
    RETURN_IF_ERROR(table.Write(PathIn(out_dir, kSelectionReportFile)));
  }
  log << "wrote " << run.result.synthetic.size() << " samples to " << out_dir
      << "\n";
  return run;
}

struct Prepared {
  io::Config config;
  Experiment ex;
  ExperimentData data;
  PrivacySpec privacy;
};

absl::StatusOr<Prepared> Prepare(const CommandOptions& options) {
  Prepared p;
  ASSIGN_OR_RETURN(p.config, io::Config::Load(options.config_path));
  ASSIGN_OR_RETURN(p.ex, ParseExperiment(p.config, options.overrides));
  ASSIGN_OR_RETURN(p.data, LoadExperimentData(p.ex));
  ASSIGN_OR_RETURN(
      p.privacy,
      ResolvePrivacy(p.ex.privacy, p.ex.schedule.iterations,
                     p.data.private_data.embeddings.rows(),
                     static_cast<int>(std::max<size_t>(1, p.ex.classes.size()))));
  return p;
}

void PrintPrivacy(std::ostream& log, const PrivacySpec& privacy) {
  log << "epsilon = " << FormatNumber(privacy.epsilon)
      << "\ndelta = " << FormatNumber(privacy.delta)
      << "\nsigma = " << FormatNumber(privacy.sigma)
      << (privacy.sigma_calibrated ? " (calibrated)" : " (from config)")
      << "\niterations = " << privacy.iterations
      << "\nthreshold = " << FormatNumber(privacy.threshold) << "\n";
}

// The single data backend named by the schedule (or [baselines] backend).
absl::StatusOr<std::string> DataBackendId(const Experiment& ex,
                                          const std::string& preferred) {
  if (!preferred.empty()) {
    const BackendSpec* spec = ex.FindBackend(preferred);
    if (spec == nullptr || spec->type != "data") {
      return absl::InvalidArgumentError(
          absl::StrCat("'", preferred, "' is not a data backend"));
    }
    return preferred;
  }
  std::optional<std::string> found;
  for (const std::string& id : ex.schedule.backend_ids) {
    const BackendSpec* spec = ex.FindBackend(id);
    if (spec == nullptr || spec->type != "data") continue;
    if (found.has_value() && *found != id) {
      return absl::InvalidArgumentError(
          "schedule uses more than one data backend");
    }
    found = id;
  }
  if (!found.has_value()) {
    return absl::InvalidArgumentError("schedule uses no data backend");
  }
  return *found;
}

// ---------------------------------------------------------------- gen-corpus

struct CorpusJob {
  std::string section;
  size_t count = 0;
  uint64_t seed = 0;
  std::string path;
  bool labels = true;
  std::string generator;  // two_blobs, or empty for a backend
  std::string blob;
  const BackendSpec* backend = nullptr;
  ParamRegion region;
  std::optional<std::string> label_param;
};

absl::StatusOr<std::vector<Sample>> RunCorpusJob(const CorpusJob& job,
                                                 int threads) {
  RngStream rng = RngStream(job.seed).Substream("gen-corpus", job.section);
  std::vector<Sample> samples;
  if (job.generator == "two_blobs") {
    TwoBlobOptions options;
    std::vector<std::pair<int, size_t>> parts;
    if (job.blob == "both") {
      parts = {{0, (job.count + 1) / 2}, {1, job.count / 2}};
    } else {
      parts = {{job.blob == "1" ? 1 : 0, job.count}};
    }
    for (const auto& [blob, n] : parts) {
      RngStream part_rng = rng.Substream("blob", static_cast<int64_t>(blob));
      ASSIGN_OR_RETURN(std::vector<Sample> part,
                       GenerateBlobSamples(options, blob, n, part_rng));
      samples.insert(samples.end(), std::make_move_iterator(part.begin()),
                     std::make_move_iterator(part.end()));
    }
  } else {
    ASSIGN_OR_RETURN(simulators::ParametricBackend backend,
                     MakeParametricBackend(*job.backend));
    ASSIGN_OR_RETURN(samples,
                     GenerateRegionSamples(backend, job.region, job.count,
                                           job.label_param, rng, threads));
  }
  if (!job.labels) {
    for (Sample& s : samples) s.label.reset();
  }
  return samples;
}

absl::StatusOr<CorpusJob> ParseCorpusJob(const io::Config& config,
                                         const std::string& section,
                                         const std::vector<BackendSpec>& backends,
                                         const CommandOptions& options) {
  CorpusJob job;
  job.section = section;
  ASSIGN_OR_RETURN(int64_t count, config.GetInt(section, "count", 0));
  if (count <= 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("[", section, "] count must be positive"));
  }
  job.count = static_cast<size_t>(count);
  ASSIGN_OR_RETURN(int64_t seed, config.GetInt(section, "seed", 0));
  job.seed = options.overrides.seed.value_or(static_cast<uint64_t>(seed));
  ASSIGN_OR_RETURN(std::string out, config.RequireString(section, "out"));
  job.path = options.overrides.out.has_value() && !fs::path(out).is_absolute()
                 ? PathIn(*options.overrides.out, out)
                 : config.ResolvePath(out);
  ASSIGN_OR_RETURN(job.labels, config.GetBool(section, "labels", true));
  job.generator = config.GetString(section, "generator", "");
  const std::string backend_id = config.GetString(section, "backend", "");
  if (job.generator.empty() == backend_id.empty()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "[", section, "] needs exactly one of backend or generator"));
  }
  if (!job.generator.empty()) {
    if (job.generator != "two_blobs") {
      return absl::InvalidArgumentError(absl::StrCat(
          "[", section, "] unknown generator '", job.generator, "'"));
    }
    job.blob = config.GetString(section, "blob", "0");
    if (job.blob != "0" && job.blob != "1" && job.blob != "both") {
      return absl::InvalidArgumentError(
          absl::StrCat("[", section, "] blob must be 0, 1 or both"));
    }
    return job;
  }
  for (const BackendSpec& b : backends) {
    if (b.id == backend_id) job.backend = &b;
  }
  if (job.backend == nullptr) {
    return absl::InvalidArgumentError(
        absl::StrCat("[", section, "] unknown backend '", backend_id, "'"));
  }
  ASSIGN_OR_RETURN(simulators::ParametricBackend backend,
                   MakeParametricBackend(*job.backend));
  const ParamSpace& space = backend.space();
  for (const std::string& key : config.Keys(section)) {
    if (!key.starts_with("region.")) continue;
    const std::string param = key.substr(7);
    if (space.CategoricalIndex(param).has_value()) {
      ASSIGN_OR_RETURN(job.region.categorical[param],
                       config.GetIntList(section, key));
    } else if (space.NumericalIndex(param).has_value()) {
      ASSIGN_OR_RETURN(std::vector<double> range,
                       config.GetDoubleList(section, key));
      if (range.size() != 2) {
        return absl::InvalidArgumentError(
            absl::StrCat("[", section, "] ", key, " needs 'lo, hi'"));
      }
      job.region.numerical[param] = {range[0], range[1]};
    } else {
      return absl::InvalidArgumentError(absl::StrCat(
          "[", section, "] ", key, ": backend has no parameter '", param, "'"));
    }
  }
  RETURN_IF_ERROR(job.region.Validate(space));
  const std::string label_param = config.GetString(section, "label_param", "");
  if (!label_param.empty()) {
    job.label_param = label_param;
  } else if (auto idx = backend.class_param_index(); idx.has_value()) {
    job.label_param = space.categorical()[*idx].name;
  }
  return job;
}

}  // namespace

const std::vector<std::string>& RequiredManifestFields() {
  static const auto* fields = new std::vector<std::string>{
      "epsilon", "delta", "sigma", "iterations", "threshold", "seed",
      "config_hash"};
  return *fields;
}

absl::Status CheckManifest(std::string_view text) {
  std::map<std::string, std::string> fields;
  bool has_table = false;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.starts_with("# ")) {
      const size_t eq = line.find('=');
      if (eq == std::string_view::npos) continue;
      fields[std::string(line.substr(2, eq - 2))] =
          std::string(line.substr(eq + 1));
    } else if (!line.empty()) {
      has_table = true;
      break;
    }
  }
  for (const std::string& key : RequiredManifestFields()) {
    auto it = fields.find(key);
    if (it == fields.end() || it->second.empty()) {
      return absl::FailedPreconditionError(
          absl::StrCat("manifest is missing '", key, "'"));
    }
  }
  if (!has_table) {
    return absl::FailedPreconditionError("manifest has no metrics table");
  }
  return absl::OkStatus();
}

absl::Status GenCorpusCommand(const CommandOptions& options) {
  std::ostream& log = LogOf(options);
  ASSIGN_OR_RETURN(io::Config config, io::Config::Load(options.config_path));
  ASSIGN_OR_RETURN(std::vector<BackendSpec> backends, ParseBackends(config));
  std::vector<CorpusJob> jobs;
  for (const std::string& section : config.Sections()) {
    if (section != "corpus" && !section.starts_with("corpus.")) continue;
    ASSIGN_OR_RETURN(CorpusJob job,
                     ParseCorpusJob(config, section, backends, options));
    jobs.push_back(std::move(job));
  }
  if (jobs.empty()) {
    return absl::InvalidArgumentError("config has no [corpus] section");
  }
  std::vector<std::string> unused = config.UnusedKeys({"corpus", "backend"});
  if (!unused.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown config keys: ", absl::StrJoin(unused, ", ")));
  }
  ASSIGN_OR_RETURN(int64_t config_threads, config.GetInt("run", "threads", 1));
  const int threads =
      options.overrides.threads.value_or(static_cast<int>(config_threads));
  const std::string hash = ConfigHash(config);
  for (const CorpusJob& job : jobs) {
    if (options.dry_run) {
      log << "[" << job.section << "] " << job.count << " samples -> "
          << job.path << "\n";
      continue;
    }
    ASSIGN_OR_RETURN(std::vector<Sample> samples, RunCorpusJob(job, threads));
    ASSIGN_OR_RETURN(io::TensorData tensor, io::TensorFromSamples(samples));
    RETURN_IF_ERROR(io::WriteTensorFile(
        job.path, tensor,
        absl::StrCat("gen-corpus [", job.section, "] config=", hash,
                     " seed=", job.seed)));
    log << "wrote " << samples.size() << " samples to " << job.path << "\n";
  }
  return absl::OkStatus();
}

absl::Status RunCommand(const CommandOptions& options) {
  std::ostream& log = LogOf(options);
  ASSIGN_OR_RETURN(Prepared p, Prepare(options));
  if (options.dry_run) {
    ASSIGN_OR_RETURN(engine::BackendRegistry registry,
                     BuildRegistry(p.ex, p.data.shape, p.data.embedder,
                                   /*use_cache=*/false));
    RETURN_IF_ERROR(MakeRunConfig(p.ex, p.privacy).Validate(registry));
    log << "config ok (hash " << p.ex.config_hash << ")\n";
    PrintPrivacy(log, p.privacy);
    return absl::OkStatus();
  }
  ASSIGN_OR_RETURN(engine::BackendRegistry registry,
                   BuildRegistry(p.ex, p.data.shape, p.data.embedder,
                                 /*use_cache=*/true));
  PrintPrivacy(log, p.privacy);
  return RunAndWrite(p.ex, p.data, p.privacy, registry, p.ex.out_dir, "run", {},
                     log)
      .status();
}

absl::Status BaselinesCommand(const CommandOptions& options) {
  std::ostream& log = LogOf(options);
  ASSIGN_OR_RETURN(Prepared p, Prepare(options));
  const Experiment& ex = p.ex;
  ASSIGN_OR_RETURN(std::string data_id,
                   DataBackendId(ex, ex.baseline_backend));
  const size_t num_private = p.data.private_data.embeddings.rows();
  const int groups = static_cast<int>(std::max<size_t>(1, ex.classes.size()));
  // Both baselines release a single histogram.
  ASSIGN_OR_RETURN(PrivacySpec single,
                   ResolvePrivacy(ex.privacy, 1, num_private, groups));

  // The baselines read the corpus of `data_id` even when PE does not.
  Experiment with_data = ex;
  if (std::find(ex.schedule.backend_ids.begin(), ex.schedule.backend_ids.end(),
                data_id) == ex.schedule.backend_ids.end()) {
    with_data.schedule.backend_ids.push_back(data_id);
  }
  ASSIGN_OR_RETURN(engine::BackendRegistry registry,
                   BuildRegistry(with_data, p.data.shape, p.data.embedder,
                                 /*use_cache=*/!options.dry_run));
  RETURN_IF_ERROR(MakeRunConfig(ex, p.privacy).Validate(registry));
  if (options.dry_run) {
    log << "config ok (hash " << ex.config_hash << ")\nbaselines:\n";
    PrintPrivacy(log, single);
    log << "pe:\n";
    PrintPrivacy(log, p.privacy);
    return absl::OkStatus();
  }
  ASSIGN_OR_RETURN(const engine::DataSource* source, registry.Data(data_id));
  ASSIGN_OR_RETURN(Evaluator eval, Evaluator::Create(ex, p.data));

  Manifest manifest({"method", "sigma", "iterations", "fed", "knn_accuracy",
                     "unique_sample_count"});
  AddExperimentFields(manifest, "baselines", ex, p.privacy, num_private);
  manifest.Set("baseline_sigma", FormatNumber(single.sigma));
  manifest.Set("baseline_backend", data_id);
  manifest.Set("num_clusters", absl::StrCat(ex.baseline_clusters));

  const std::vector<std::optional<int>> group_classes = [&] {
    std::vector<std::optional<int>> out;
    if (ex.classes.empty()) out.push_back(std::nullopt);
    for (int c : ex.classes) out.push_back(c);
    return out;
  }();
  const size_t per_group = ex.n_syn / group_classes.size();
  const RngStream root(ex.seed);
  for (const std::string method : {"direct_histogram", "cluster_histogram"}) {
    Flattened selected;
    selected.embeddings = EmbeddingMatrix(0, metrics::PixelEmbedder::kDim);
    for (const std::optional<int>& c : group_classes) {
      ASSIGN_OR_RETURN(const data_backend::Corpus* corpus, source->ForClass(c));
      RngStream rng = root.Substream("baseline", method,
                                     static_cast<int64_t>(c.value_or(-1)));
      const EmbeddingMatrix priv = p.data.private_data.ForClass(c);
      absl::StatusOr<data_backend::BaselineSelection> sel =
          method == std::string("direct_histogram")
              ? data_backend::BaselineDirectHistogram(
                    priv, *corpus, single.sigma, single.threshold, per_group,
                    rng, ex.threads)
              : data_backend::BaselineClusterHistogram(
                    priv, *corpus, ex.baseline_clusters, single.sigma,
                    single.threshold, per_group, rng, ex.threads);
      RETURN_IF_ERROR(sel.status());
      for (size_t i : sel->selected) {
        selected.embeddings.AppendRow(corpus->embeddings().row(i));
        selected.samples.push_back(corpus->MakeSample(i, c));
        if (c.has_value()) selected.labels.push_back(*c);
      }
    }
    ASSIGN_OR_RETURN(std::optional<double> fed, eval.Fed(selected.embeddings));
    ASSIGN_OR_RETURN(std::optional<double> acc,
                     eval.Accuracy(selected.embeddings, selected.labels));
    const size_t unique = metrics::UniqueSampleCount(selected.samples);
    log << method << ": FED " << Optional(fed) << ", k-NN accuracy "
        << Optional(acc) << "\n";
    manifest.table()
        .AddRow()
        .Add(method)
        .Add(single.sigma)
        .Add(1)
        .Add(fed)
        .Add(acc)
        .Add(unique);
  }

  ASSIGN_OR_RETURN(PeRun run, ExecutePe(ex, p.data, p.privacy, registry, eval,
                                        /*keep_trace=*/false, log));
  log << "pe: FED " << Optional(run.final_fed) << ", k-NN accuracy "
      << Optional(run.final_accuracy) << "\n";
  manifest.table()
      .AddRow()
      .Add("pe")
      .Add(p.privacy.sigma)
      .Add(p.privacy.iterations)
      .Add(run.final_fed)
      .Add(run.final_accuracy)
      .Add(metrics::UniqueSampleCount(run.final_population.samples));
  const std::string text = manifest.ToString();
  RETURN_IF_ERROR(CheckManifest(text));
  return io::WriteFileBytes(PathIn(ex.out_dir, kBaselinesFile), text);
}

absl::Status AblateCommand(const CommandOptions& options) {
  std::ostream& log = LogOf(options);
  ASSIGN_OR_RETURN(Prepared p, Prepare(options));
  const std::string axis = options.axis.empty() ? p.ex.ablate_axis : options.axis;
  if (axis != "schedule-small" && axis != "schedule-large" &&
      axis != "alignment") {
    return absl::InvalidArgumentError(absl::StrCat(
        "unknown ablation axis '", axis,
        "' (expected schedule-small, schedule-large or alignment)"));
  }
  const std::string out_dir = PathIn(p.ex.out_dir, axis);

  if (axis != "alignment") {
    Experiment ex = p.ex;
    ex.schedule = p.ex.schedule.Clamped(axis == "schedule-small"
                                            ? IterationSchedule::Clamp::kSmallest
                                            : IterationSchedule::Clamp::kLargest);
    ASSIGN_OR_RETURN(engine::BackendRegistry registry,
                     BuildRegistry(ex, p.data.shape, p.data.embedder,
                                   /*use_cache=*/!options.dry_run));
    RETURN_IF_ERROR(MakeRunConfig(ex, p.privacy).Validate(registry));
    if (options.dry_run) {
      log << "config ok; " << axis << " gamma = "
          << absl::StrJoin(ex.schedule.gamma, " ") << "\n";
      PrintPrivacy(log, p.privacy);
      return absl::OkStatus();
    }
    return RunAndWrite(ex, p.data, p.privacy, registry, out_dir, "ablate",
                       {{"axis", axis}}, log)
        .status();
  }

  ASSIGN_OR_RETURN(std::string data_id, DataBackendId(p.ex, ""));
  const BackendSpec* spec = p.ex.FindBackend(data_id);
  const size_t k_max = EffectiveKMax(*spec, p.ex.schedule);
  ASSIGN_OR_RETURN(
      data_backend::Corpus corpus,
      LoadCorpus(spec->corpus_path, k_max, p.data.shape, p.data.embedder,
                 p.ex.threads,
                 options.dry_run ? std::string() : KnnCacheDir(spec->corpus_path)));
  constexpr size_t kParts = 5;
  ASSIGN_OR_RETURN(std::vector<data_backend::AlignmentPart> parts,
                   data_backend::PartitionByAlignment(
                       corpus, p.data.private_data.embeddings, kParts,
                       p.ex.threads));
  if (options.dry_run) {
    log << "config ok; alignment parts:";
    for (const auto& part : parts) log << " " << part.items.size();
    log << "\n";
    PrintPrivacy(log, p.privacy);
    return absl::OkStatus();
  }
  io::CsvTable summary(
      {"part", "size", "mean_alignment_distance", "fed", "knn_accuracy"});
  for (size_t i = 0; i < parts.size(); ++i) {
    ASSIGN_OR_RETURN(data_backend::Corpus subset,
                     corpus.Subset(parts[i].items, k_max, p.ex.threads));
    std::map<std::string, const data_backend::Corpus*> prebuilt = {
        {data_id, &subset}};
    ASSIGN_OR_RETURN(engine::BackendRegistry registry,
                     BuildRegistry(p.ex, p.data.shape, p.data.embedder,
                                   /*use_cache=*/false, prebuilt));
    log << "alignment part " << i << " (" << parts[i].items.size()
        << " items)\n";
    ASSIGN_OR_RETURN(
        PeRun run,
        RunAndWrite(p.ex, p.data, p.privacy, registry,
                    PathIn(out_dir, absl::StrCat("part-", i)), "ablate",
                    {{"axis", axis},
                     {"alignment_part", absl::StrCat(i)},
                     {"alignment_part_size", absl::StrCat(parts[i].items.size())},
                     {"alignment_mean_distance",
                      FormatNumber(parts[i].mean_score)}},
                    log));
    summary.AddRow()
        .Add(i)
        .Add(parts[i].items.size())
        .Add(parts[i].mean_score)
        .Add(run.final_fed)
        .Add(run.final_accuracy);
  }
  return summary.Write(PathIn(out_dir, "summary.csv"));
}

absl::Status RenderPreviewCommand(const CommandOptions& options) {
  std::ostream& log = LogOf(options);
  ASSIGN_OR_RETURN(io::Config config, io::Config::Load(options.config_path));
  ASSIGN_OR_RETURN(std::vector<BackendSpec> backends, ParseBackends(config));
  std::string id = config.GetString("preview", "backend", "");
  if (id.empty()) {
    for (const BackendSpec& b : backends) {
      if (b.type == "data") continue;
      if (!id.empty()) {
        return absl::InvalidArgumentError(
            "several parametric backends; set [preview] backend");
      }
      id = b.id;
    }
  }
  const BackendSpec* spec = nullptr;
  for (const BackendSpec& b : backends) {
    if (b.id == id) spec = &b;
  }
  if (spec == nullptr || spec->type == "data") {
    return absl::InvalidArgumentError(
        absl::StrCat("no parametric backend '", id, "' to preview"));
  }
  ASSIGN_OR_RETURN(int64_t count, config.GetInt("preview", "count", 16));
  if (count <= 0) {
    return absl::InvalidArgumentError("[preview] count must be positive");
  }
  ASSIGN_OR_RETURN(int64_t seed, config.GetInt("preview", "seed", 0));
  const std::string name =
      config.GetString("preview", "out", absl::StrCat("preview-", id, ".spe"));
  std::vector<std::string> unused = config.UnusedKeys({"preview", "backend"});
  if (!unused.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown config keys: ", absl::StrJoin(unused, ", ")));
  }
  const std::string path =
      options.overrides.out.has_value() && !fs::path(name).is_absolute()
          ? PathIn(*options.overrides.out, name)
          : config.ResolvePath(name);
  ASSIGN_OR_RETURN(simulators::ParametricBackend backend,
                   MakeParametricBackend(*spec));
  if (options.dry_run) {
    log << count << " samples of " << id << " -> " << path << "\n";
    return absl::OkStatus();
  }
  RngStream rng = RngStream(options.overrides.seed.value_or(
                                static_cast<uint64_t>(seed)))
                      .Substream("preview", id);
  ASSIGN_OR_RETURN(std::vector<Sample> samples,
                   simulators::RandomApi(backend, static_cast<int>(count),
                                         std::nullopt, rng,
                                         options.overrides.threads.value_or(1)));
  ASSIGN_OR_RETURN(io::TensorData tensor, io::TensorFromSamples(samples));
  RETURN_IF_ERROR(io::WriteTensorFile(path, tensor,
                                      absl::StrCat("render-preview ", id)));
  // Parameters next to the pixels, one sample per line.
  const ParamSpace& space = backend.space();
  std::string params;
  for (size_t i = 0; i < samples.size(); ++i) {
    const auto* p = std::get_if<ParamVector>(&samples[i].provenance);
    if (p == nullptr) continue;
    absl::StrAppend(&params, i, ":");
    for (size_t j = 0; j < p->categorical.size(); ++j) {
      absl::StrAppend(&params, " ", space.categorical()[j].name, "=",
                      p->categorical[j]);
    }
    for (size_t j = 0; j < p->numerical.size(); ++j) {
      absl::StrAppend(&params, " ", space.numerical()[j].name, "=",
                      FormatNumber(p->numerical[j]));
    }
    params += "\n";
  }
  RETURN_IF_ERROR(io::WriteFileBytes(path + ".params.txt", params));
  log << "wrote " << samples.size() << " samples to " << path << "\n";
  return absl::OkStatus();
}

absl::Status MetricsCommand(const CommandOptions& options) {
  std::ostream& log = LogOf(options);
  io::Config config;
  ASSIGN_OR_RETURN(config, io::Config::Load(options.config_path));
  ASSIGN_OR_RETURN(Experiment ex, ParseExperiment(config, options.overrides));
  ASSIGN_OR_RETURN(ExperimentData data, LoadExperimentData(ex));
  const std::string path = ex.metrics.synthetic_path.empty()
                               ? PathIn(ex.out_dir, kSyntheticFile)
                               : ex.metrics.synthetic_path;
  ASSIGN_OR_RETURN(io::TensorData tensor, io::ReadTensorFile(path));
  ASSIGN_OR_RETURN(std::vector<Sample> samples, io::SamplesFromTensor(tensor));
  if (options.dry_run) {
    log << samples.size() << " samples in " << path << "\n";
    return absl::OkStatus();
  }
  ASSIGN_OR_RETURN(EmbeddingMatrix embeds,
                   data.embedder.EmbedAll(std::span<const Sample>(samples),
                                          ex.threads));
  std::vector<int> labels;
  for (const Sample& s : samples) {
    if (!s.label.has_value()) {
      labels.clear();
      break;
    }
    labels.push_back(*s.label);
  }
  ASSIGN_OR_RETURN(Evaluator eval, Evaluator::Create(ex, data));
  ASSIGN_OR_RETURN(std::optional<double> fed, eval.Fed(embeds));
  ASSIGN_OR_RETURN(std::optional<double> acc, eval.Accuracy(embeds, labels));
  const size_t unique = metrics::UniqueSampleCount(samples);
  ASSIGN_OR_RETURN(std::string digest, io::FileDigest(path));

  Manifest manifest({"n", "fed", "knn_accuracy", "unique_sample_count"});
  manifest.Set("command", "metrics");
  manifest.Set("dataset_fnv1a64", digest);
  manifest.Set("config_hash", ex.config_hash);
  manifest.Set("knn_k", absl::StrCat(ex.metrics.knn_k));
  manifest.table().AddRow().Add(samples.size()).Add(fed).Add(acc).Add(unique);
  log << "FED " << Optional(fed) << ", k-NN accuracy " << Optional(acc)
      << ", unique " << unique << "\n";
  return io::WriteFileBytes(PathIn(ex.out_dir, kMetricsFile),
                            manifest.ToString());
}

const std::vector<std::string>& CommandNames() {
  static const auto* names = new std::vector<std::string>{
      "gen-corpus", "run", "baselines", "ablate", "render-preview", "metrics"};
  return *names;
}

absl::Status DispatchCommand(std::string_view verb,
                             const CommandOptions& options) {
  if (verb == "gen-corpus") return GenCorpusCommand(options);
  if (verb == "run") return RunCommand(options);
  if (verb == "baselines") return BaselinesCommand(options);
  if (verb == "ablate") return AblateCommand(options);
  if (verb == "render-preview") return RenderPreviewCommand(options);
  if (verb == "metrics") return MetricsCommand(options);
  return absl::InvalidArgumentError(
      absl::StrCat("unknown command '", std::string(verb), "'"));
}

}  // namespace privsim::cli
