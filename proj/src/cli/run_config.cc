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

#include "privsim/cli/run_config.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <set>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "privsim/cli/exit_codes.h"
#include "privsim/core/hash.h"
#include "privsim/core/rng.h"
#include "privsim/core/status_macros.h"
#include "privsim/io/tensor_file.h"
#include "privsim/simulators/avatar_renderer.h"
#include "privsim/simulators/glyph_bank.h"
#include "privsim/simulators/text_renderer.h"

namespace privsim::cli {
namespace {

constexpr char kKnnMagic[4] = {'S', 'P', 'E', 'K'};

std::string ShapeString(ImageShape s) {
  return absl::StrCat(s.height, "x", s.width, "x", s.channels);
}

absl::StatusOr<engine::ClassMode> ParseClassMode(const std::string& v) {
  if (v == "auto") return engine::ClassMode::kAuto;
  if (v == "available") return engine::ClassMode::kAvailable;
  if (v == "unavailable") return engine::ClassMode::kUnavailable;
  return absl::InvalidArgumentError(absl::StrCat(
      "[run] class_mode must be auto, available or unavailable, got '", v,
      "'"));
}

absl::StatusOr<dp::LogBase> ParseLogBase(const std::string& v) {
  if (v == "e" || v == "natural") return dp::LogBase::kNatural;
  if (v == "2") return dp::LogBase::kTwo;
  if (v == "10") return dp::LogBase::kTen;
  return absl::InvalidArgumentError(
      absl::StrCat("[privacy] log_base must be e, 2 or 10, got '", v, "'"));
}

// "auto" (or absent) -> nullopt.
absl::StatusOr<std::optional<double>> GetAutoDouble(const io::Config& config,
                                                    const std::string& section,
                                                    const std::string& key) {
  auto v = config.Get(section, key);
  if (!v.has_value() || *v == "auto") return std::optional<double>();
  ASSIGN_OR_RETURN(double d, config.GetDouble(section, key, 0.0));
  return std::optional<double>(d);
}

void PutU32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

uint32_t GetU32(const std::string& in, size_t pos) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<uint32_t>(static_cast<uint8_t>(in[pos + i])) << (8 * i);
  }
  return v;
}

std::string EncodeKnn(const data_backend::KnnTable& knn) {
  std::string out(kKnnMagic, 4);
  PutU32(out, static_cast<uint32_t>(knn.rows));
  PutU32(out, static_cast<uint32_t>(knn.k_max));
  for (uint32_t idx : knn.indices) PutU32(out, idx);
  return out;
}

std::optional<data_backend::KnnTable> DecodeKnn(const std::string& bytes,
                                                size_t rows, size_t k_max) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kKnnMagic, 4) != 0) {
    return std::nullopt;
  }
  if (GetU32(bytes, 4) != rows || GetU32(bytes, 8) != k_max) {
    return std::nullopt;
  }
  if (bytes.size() != 12 + 4 * rows * k_max) return std::nullopt;
  data_backend::KnnTable knn;
  knn.rows = rows;
  knn.k_max = k_max;
  knn.indices.resize(rows * k_max);
  for (size_t i = 0; i < knn.indices.size(); ++i) {
    knn.indices[i] = GetU32(bytes, 12 + 4 * i);
  }
  return knn;
}

std::vector<int> LabelsOf(const std::vector<Sample>& samples) {
  std::vector<int> labels;
  for (const Sample& s : samples) {
    if (!s.label.has_value()) return {};
    labels.push_back(*s.label);
  }
  return labels;
}

absl::StatusOr<std::vector<Sample>> ReadSamples(const std::string& path,
                                                ImageShape* shape) {
  ASSIGN_OR_RETURN(io::TensorData data, io::ReadTensorFile(path));
  if (data.dtype != io::DType::kU8) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": image datasets must be u8"));
  }
  if (data.n == 0) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": no samples"));
  }
  *shape = ImageShape{static_cast<int>(data.height),
                      static_cast<int>(data.width),
                      static_cast<int>(data.channels)};
  return io::SamplesFromTensor(data);
}

}  // namespace

const BackendSpec* Experiment::FindBackend(const std::string& id) const {
  for (const BackendSpec& b : backends) {
    if (b.id == id) return &b;
  }
  return nullptr;
}

absl::StatusOr<std::vector<BackendSpec>> ParseBackends(
    const io::Config& config) {
  std::vector<BackendSpec> out;
  for (const std::string& section : config.Sections()) {
    if (!section.starts_with("backend.")) continue;
    BackendSpec spec;
    spec.id = section.substr(std::strlen("backend."));
    if (spec.id.empty()) {
      return absl::InvalidArgumentError("backend section without an id");
    }
    ASSIGN_OR_RETURN(spec.type, config.RequireString(section, "type"));
    if (spec.type == "text") {
      ASSIGN_OR_RETURN(spec.size_lo, config.GetDouble(section, "size_lo", 10));
      ASSIGN_OR_RETURN(spec.size_hi, config.GetDouble(section, "size_hi", 30));
    } else if (spec.type == "data") {
      ASSIGN_OR_RETURN(std::string path,
                       config.RequireString(section, "corpus"));
      spec.corpus_path = config.ResolvePath(path);
      ASSIGN_OR_RETURN(spec.slice_by_class,
                       config.GetBool(section, "slice_by_class", false));
      ASSIGN_OR_RETURN(int64_t k, config.GetInt(section, "k_max", 0));
      if (k < 0) {
        return absl::InvalidArgumentError(
            absl::StrCat("[", section, "] k_max must be >= 0"));
      }
      spec.k_max = static_cast<size_t>(k);
    } else if (spec.type != "avatar") {
      return absl::InvalidArgumentError(
          absl::StrCat("[", section, "] unknown type '", spec.type,
                       "' (expected text, avatar or data)"));
    }
    out.push_back(std::move(spec));
  }
  return out;
}

absl::StatusOr<simulators::ParametricBackend> MakeParametricBackend(
    const BackendSpec& spec) {
  if (spec.type == "text") {
    if (!(spec.size_lo <= spec.size_hi)) {
      return absl::InvalidArgumentError(
          absl::StrCat("backend ", spec.id, ": size_lo > size_hi"));
    }
    return simulators::ParametricBackend::Create(
        spec.id,
        simulators::TextParamSpace({spec.size_lo, spec.size_hi}),
        ImageShape{simulators::kTextCanvas, simulators::kTextCanvas, 1},
        simulators::RenderText, std::string("text"),
        simulators::GlyphBank::kNumDigits);
  }
  if (spec.type == "avatar") {
    return simulators::ParametricBackend::Create(
        spec.id, simulators::AvatarParamSpace(),
        ImageShape{simulators::kAvatarCanvas, simulators::kAvatarCanvas, 3},
        simulators::RenderAvatar);
  }
  return absl::InvalidArgumentError(
      absl::StrCat("backend ", spec.id, " is not parametric"));
}

std::string ConfigHash(const io::Config& config) {
  Fnv1a64 h;
  h.Update(config.Canonical());
  return HexDigest(h.digest());
}

const std::vector<std::string>& ExperimentSections() {
  static const auto* sections = new std::vector<std::string>{
      "run", "privacy", "schedule", "backend", "metrics", "baselines",
      "ablate"};
  return *sections;
}

absl::StatusOr<Experiment> ParseExperiment(io::Config& config,
                                           const CommandOverrides& overrides) {
  if (overrides.seed.has_value()) {
    config.Set("run", "seed", absl::StrCat(*overrides.seed));
  }
  Experiment ex;
  ex.config_hash = ConfigHash(config);

  ASSIGN_OR_RETURN(int64_t seed, config.GetInt("run", "seed", 0));
  if (seed < 0) return absl::InvalidArgumentError("[run] seed must be >= 0");
  ex.seed = static_cast<uint64_t>(seed);
  ASSIGN_OR_RETURN(int64_t n_syn, config.GetInt("run", "n_syn", 0));
  if (n_syn <= 0) {
    return absl::InvalidArgumentError("[run] n_syn must be positive");
  }
  ex.n_syn = static_cast<size_t>(n_syn);
  ASSIGN_OR_RETURN(ex.classes, config.GetIntList("run", "classes"));
  ASSIGN_OR_RETURN(ex.class_mode,
                   ParseClassMode(config.GetString("run", "class_mode", "auto")));
  ASSIGN_OR_RETURN(int64_t threads, config.GetInt("run", "threads", 1));
  ex.threads = static_cast<int>(overrides.threads.value_or(threads));
  if (ex.threads < 1) {
    return absl::InvalidArgumentError("thread count must be >= 1");
  }
  ASSIGN_OR_RETURN(std::string private_path,
                   config.RequireString("run", "private"));
  ex.private_path = config.ResolvePath(private_path);
  const std::string test_path = config.GetString("run", "test", "");
  if (!test_path.empty()) ex.test_path = config.ResolvePath(test_path);
  const std::string config_out =
      config.ResolvePath(config.GetString("run", "out", "out"));
  ex.out_dir = overrides.out.value_or(config_out);

  ASSIGN_OR_RETURN(ex.privacy.epsilon,
                   config.GetDouble("privacy", "epsilon", 1.0));
  ASSIGN_OR_RETURN(ex.privacy.delta, GetAutoDouble(config, "privacy", "delta"));
  ASSIGN_OR_RETURN(ex.privacy.log_base,
                   ParseLogBase(config.GetString("privacy", "log_base", "e")));
  ASSIGN_OR_RETURN(ex.privacy.sigma, GetAutoDouble(config, "privacy", "sigma"));
  ASSIGN_OR_RETURN(ex.privacy.threshold,
                   config.GetDouble("privacy", "threshold", 0.0));

  ASSIGN_OR_RETURN(int64_t iterations,
                   config.GetInt("schedule", "iterations", 0));
  if (iterations < 1) {
    return absl::InvalidArgumentError("[schedule] iterations must be >= 1");
  }
  ex.schedule.iterations = static_cast<int>(iterations);
  ex.schedule.backend_ids = config.GetStringList("schedule", "backends");
  if (ex.schedule.backend_ids.size() == 1) {
    ex.schedule.backend_ids.assign(ex.schedule.iterations + 1,
                                   ex.schedule.backend_ids[0]);
  }
  for (const std::string& key : config.Keys("schedule")) {
    const bool is_alpha = key.starts_with("alpha.");
    const bool is_beta = key.starts_with("beta.");
    if (!is_alpha && !is_beta) continue;
    const std::string param = key.substr(is_alpha ? 6 : 5);
    ASSIGN_OR_RETURN(std::vector<double> values,
                     config.GetDoubleList("schedule", key));
    (is_alpha ? ex.schedule.alpha : ex.schedule.beta)[param] = values;
  }
  ASSIGN_OR_RETURN(ex.schedule.gamma, config.GetIntList("schedule", "gamma"));
  RETURN_IF_ERROR(ex.schedule.Validate());

  ASSIGN_OR_RETURN(ex.backends, ParseBackends(config));

  MetricsSettings& m = ex.metrics;
  ASSIGN_OR_RETURN(int64_t knn_k, config.GetInt("metrics", "knn_k", 5));
  m.knn_k = static_cast<int>(knn_k);
  ASSIGN_OR_RETURN(m.select_k, config.GetIntList("metrics", "select_k"));
  ASSIGN_OR_RETURN(m.epsilon_select,
                   config.GetDouble("metrics", "epsilon_select", 0.0));
  ASSIGN_OR_RETURN(m.validation_fraction,
                   config.GetDouble("metrics", "validation_fraction", 0.1));
  ASSIGN_OR_RETURN(m.per_class, config.GetBool("metrics", "per_class", false));
  ASSIGN_OR_RETURN(m.selection_report,
                   config.GetBool("metrics", "selection_report", false));
  ASSIGN_OR_RETURN(m.ridge, config.GetDouble("metrics", "ridge", 1e-6));
  const std::string synthetic = config.GetString("metrics", "synthetic", "");
  if (!synthetic.empty()) m.synthetic_path = config.ResolvePath(synthetic);
  if (m.knn_k < 1 || m.knn_k % 2 == 0) {
    return absl::InvalidArgumentError("[metrics] knn_k must be odd and >= 1");
  }
  for (int k : m.select_k) {
    if (k < 1 || k % 2 == 0) {
      return absl::InvalidArgumentError(
          "[metrics] select_k entries must be odd and >= 1");
    }
  }
  if (!m.select_k.empty() && !(m.epsilon_select > 0.0)) {
    return absl::InvalidArgumentError(
        "[metrics] select_k needs epsilon_select > 0");
  }
  if (!m.select_k.empty() &&
      !(m.validation_fraction > 0.0 && m.validation_fraction < 1.0)) {
    return absl::InvalidArgumentError(
        "[metrics] validation_fraction must be in (0, 1)");
  }

  ex.baseline_backend = config.GetString("baselines", "backend", "");
  ASSIGN_OR_RETURN(int64_t clusters,
                   config.GetInt("baselines", "num_clusters", 100));
  if (clusters < 1) {
    return absl::InvalidArgumentError("[baselines] num_clusters must be >= 1");
  }
  ex.baseline_clusters = static_cast<size_t>(clusters);
  ex.ablate_axis = config.GetString("ablate", "axis", "");

  std::vector<std::string> unused = config.UnusedKeys(ExperimentSections());
  if (!unused.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown config keys: ", absl::StrJoin(unused, ", ")));
  }
  return ex;
}

absl::StatusOr<PrivacySpec> ResolvePrivacy(const PrivacySettings& settings,
                                           int iterations, size_t num_private,
                                           int num_classes) {
  PrivacySpec spec;
  spec.epsilon = settings.epsilon;
  spec.iterations = iterations;
  spec.threshold = settings.threshold;
  spec.num_classes = num_classes;
  if (settings.delta.has_value()) {
    spec.delta = *settings.delta;
  } else {
    auto delta = dp::DefaultDelta(static_cast<int64_t>(num_private),
                                  settings.log_base);
    if (!delta.ok()) return AsCalibrationError(delta.status());
    spec.delta = *delta;
  }
  if (settings.sigma.has_value()) {
    if (!(*settings.sigma >= 0.0) || !std::isfinite(*settings.sigma)) {
      return AsCalibrationError(
          absl::InvalidArgumentError("[privacy] sigma must be finite and >= 0"));
    }
    spec.sigma = *settings.sigma;
    spec.sigma_calibrated = false;
  } else {
    auto sigma = dp::CalibrateSigma(spec.epsilon, spec.delta, iterations);
    if (!sigma.ok()) return AsCalibrationError(sigma.status());
    spec.sigma = *sigma;
    spec.sigma_calibrated = true;
  }
  if (!(spec.threshold >= 0.0)) {
    return AsCalibrationError(
        absl::InvalidArgumentError("[privacy] threshold must be >= 0"));
  }
  return spec;
}

absl::StatusOr<ExperimentData> LoadExperimentData(
    const Experiment& experiment) {
  ExperimentData out;
  ASSIGN_OR_RETURN(std::vector<Sample> priv,
                   ReadSamples(experiment.private_path, &out.shape));
  out.embedder = metrics::PixelEmbedder(out.shape);
  const metrics::PixelEmbedder& embedder = out.embedder;
  ASSIGN_OR_RETURN(EmbeddingMatrix priv_embeds,
                   embedder.EmbedAll(std::span<const Sample>(priv),
                                     experiment.threads));
  std::vector<int> labels = LabelsOf(priv);
  if (!experiment.classes.empty() && labels.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat(experiment.private_path,
                     ": conditional runs need a labeled private set"));
  }

  std::vector<size_t> order(priv.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  size_t num_validation = 0;
  if (!experiment.metrics.select_k.empty()) {
    RngStream rng = RngStream(experiment.seed).Substream("cli", "split");
    for (size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.UniformIndex(i)]);
    }
    num_validation = static_cast<size_t>(std::llround(
        experiment.metrics.validation_fraction * static_cast<double>(priv.size())));
    if (num_validation == 0 || num_validation >= priv.size()) {
      return absl::InvalidArgumentError(
          "validation split leaves an empty private or validation set");
    }
    if (labels.empty()) {
      return absl::InvalidArgumentError(
          "model selection needs a labeled private set");
    }
    // Validation rows first in the shuffled order; keep both parts in file
    // order so the split does not reorder the mechanism's input.
    std::sort(order.begin(), order.begin() + num_validation);
    std::sort(order.begin() + num_validation, order.end());
  }
  const size_t dim = priv_embeds.dim();
  out.validation.embeddings = EmbeddingMatrix(0, dim);
  out.private_data.embeddings = EmbeddingMatrix(0, dim);
  for (size_t r = 0; r < order.size(); ++r) {
    const size_t i = order[r];
    const bool validation = r < num_validation;
    (validation ? out.validation.embeddings : out.private_data.embeddings)
        .AppendRow(priv_embeds.row(i));
    if (!labels.empty()) {
      (validation ? out.validation.labels : out.private_data.labels)
          .push_back(labels[i]);
    }
  }
  if (experiment.classes.empty()) out.private_data.labels.clear();

  if (!experiment.test_path.empty()) {
    ImageShape test_shape;
    ASSIGN_OR_RETURN(std::vector<Sample> test,
                     ReadSamples(experiment.test_path, &test_shape));
    if (!(test_shape == out.shape)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "test set is ", ShapeString(test_shape), " but private set is ",
          ShapeString(out.shape)));
    }
    LabeledEmbeddings t;
    ASSIGN_OR_RETURN(t.embeddings,
                     embedder.EmbedAll(std::span<const Sample>(test),
                                       experiment.threads));
    t.labels = LabelsOf(test);
    out.test = std::move(t);
  }
  return out;
}

absl::StatusOr<data_backend::Corpus> LoadCorpus(
    const std::string& path, size_t k_max, ImageShape expected_shape,
    const metrics::PixelEmbedder& embedder, int threads,
    const std::string& cache_dir) {
  ASSIGN_OR_RETURN(std::string bytes, io::ReadFileBytes(path));
  auto data = io::DecodeTensor(bytes);
  if (!data.ok()) {
    return absl::DataLossError(
        absl::StrCat(path, ": ", data.status().message()));
  }
  const ImageShape shape{static_cast<int>(data->height),
                         static_cast<int>(data->width),
                         static_cast<int>(data->channels)};
  if (!(shape == expected_shape)) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": corpus is ", ShapeString(shape),
                     " but private set is ", ShapeString(expected_shape)));
  }
  ASSIGN_OR_RETURN(std::vector<Sample> samples, io::SamplesFromTensor(*data));
  ASSIGN_OR_RETURN(EmbeddingMatrix embeds,
                   embedder.EmbedAll(std::span<const Sample>(samples), threads));
  if (k_max > samples.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        path, ": k_max ", k_max, " exceeds corpus size ", samples.size()));
  }

  std::string cache_path;
  if (!cache_dir.empty()) {
    Fnv1a64 h;
    h.Update(bytes);
    cache_path = (std::filesystem::path(cache_dir) /
                  absl::StrCat("knn-", HexDigest(h.digest()), "-e",
                               metrics::PixelEmbedder::kVersion, "-k", k_max,
                               ".bin"))
                     .string();
    auto cached = io::ReadFileBytes(cache_path);
    if (cached.ok()) {
      if (auto knn = DecodeKnn(*cached, samples.size(), k_max)) {
        return data_backend::Corpus::FromParts(std::move(samples),
                                               std::move(embeds),
                                               *std::move(knn));
      }
    }
  }
  ASSIGN_OR_RETURN(data_backend::KnnTable knn,
                   data_backend::BuildKnnTable(embeds, k_max, threads));
  // The cache only saves time; a failed write is not an error.
  if (!cache_path.empty()) (void)io::WriteFileBytes(cache_path, EncodeKnn(knn));
  return data_backend::Corpus::FromParts(std::move(samples), std::move(embeds),
                                         std::move(knn));
}

absl::StatusOr<engine::DataSource> MakeDataSource(
    const BackendSpec& spec, data_backend::Corpus corpus,
    const std::vector<int>& classes, int threads) {
  if (spec.slice_by_class) {
    if (classes.empty()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "backend ", spec.id, ": slice_by_class needs [run] classes"));
    }
    return engine::DataSource::CreateSliced(spec.id, std::move(corpus),
                                            classes, threads);
  }
  return engine::DataSource::Create(spec.id, std::move(corpus));
}

std::string KnnCacheDir(const std::string& corpus_path) {
  return (std::filesystem::path(corpus_path).parent_path() / ".knn-cache")
      .string();
}

size_t EffectiveKMax(const BackendSpec& spec,
                     const IterationSchedule& schedule) {
  if (spec.k_max > 0) return spec.k_max;
  return static_cast<size_t>(std::max(1, schedule.MaxGamma()));
}

absl::StatusOr<engine::BackendRegistry> BuildRegistry(
    const Experiment& experiment, ImageShape shape,
    const metrics::PixelEmbedder& embedder, bool use_cache,
    const std::map<std::string, const data_backend::Corpus*>& prebuilt) {
  engine::BackendRegistry registry;
  std::set<std::string> seen;
  for (const std::string& id : experiment.schedule.backend_ids) {
    if (!seen.insert(id).second) continue;
    const BackendSpec* spec = experiment.FindBackend(id);
    if (spec == nullptr) {
      return absl::InvalidArgumentError(
          absl::StrCat("schedule names unknown backend '", id, "'"));
    }
    if (spec->type == "data") {
      auto given = prebuilt.find(id);
      std::optional<data_backend::Corpus> loaded;
      if (given != prebuilt.end()) {
        loaded = *given->second;
      } else {
        ASSIGN_OR_RETURN(loaded, LoadCorpus(spec->corpus_path,
                                            EffectiveKMax(*spec,
                                                          experiment.schedule),
                                            shape, embedder,
                                            experiment.threads,
                                            use_cache
                                                ? KnnCacheDir(spec->corpus_path)
                                                : std::string()));
      }
      data_backend::Corpus corpus = *std::move(loaded);
      ASSIGN_OR_RETURN(engine::DataSource source,
                       MakeDataSource(*spec, std::move(corpus),
                                      experiment.classes, experiment.threads));
      RETURN_IF_ERROR(registry.Add(std::move(source)));
    } else {
      ASSIGN_OR_RETURN(simulators::ParametricBackend backend,
                       MakeParametricBackend(*spec));
      if (!(backend.shape() == shape)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "backend ", id, " renders ", ShapeString(backend.shape()),
            " but private set is ", ShapeString(shape)));
      }
      RETURN_IF_ERROR(registry.Add(std::move(backend)));
    }
  }
  return registry;
}

engine::RunConfig MakeRunConfig(const Experiment& experiment,
                                const PrivacySpec& privacy) {
  engine::RunConfig config;
  config.privacy = privacy;
  config.schedule = experiment.schedule;
  config.n_syn = experiment.n_syn;
  config.classes = experiment.classes;
  config.class_mode = experiment.class_mode;
  config.seed = experiment.seed;
  config.threads = experiment.threads;
  return config;
}

}  // namespace privsim::cli
