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

#include "privsim/engine/run_pe.h"

#include <algorithm>
#include <set>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privsim/core/parallel.h"
#include "privsim/core/status_macros.h"
#include "privsim/data_backend/corpus.h"
#include "privsim/engine/resample.h"

namespace privsim::engine {
namespace {

absl::StatusOr<bool> PinClass(const RunConfig& config,
                              const BackendRegistry& registry,
                              const std::string& backend_id) {
  if (config.classes.empty()) return false;
  ASSIGN_OR_RETURN(BackendKind kind, registry.Kind(backend_id));
  if (kind != BackendKind::kParametric) return false;
  ASSIGN_OR_RETURN(const simulators::ParametricBackend* backend,
                   registry.Parametric(backend_id));
  const bool has_param = backend->class_param_index().has_value();
  switch (config.class_mode) {
    case ClassMode::kAuto:
      return has_param;
    case ClassMode::kAvailable:
      if (!has_param) {
        return absl::InvalidArgumentError(absl::StrCat(
            "backend '", backend_id, "' has no class parameter"));
      }
      return true;
    case ClassMode::kUnavailable:
      return false;
  }
  return false;
}

// Embeddings of a population produced by `backend_id`. Corpus items reuse the
// corpus embeddings; everything else goes through the embedder.
absl::StatusOr<EmbeddingMatrix> EmbedPopulation(
    const std::vector<Sample>& population, const std::string& backend_id,
    std::optional<int> class_id, const BackendRegistry& registry,
    const metrics::PixelEmbedder& embedder, int threads) {
  ASSIGN_OR_RETURN(BackendKind kind, registry.Kind(backend_id));
  if (kind == BackendKind::kData) {
    ASSIGN_OR_RETURN(const DataSource* source, registry.Data(backend_id));
    ASSIGN_OR_RETURN(const data_backend::Corpus* corpus,
                     source->ForClass(class_id));
    EmbeddingMatrix out(population.size(), corpus->embeddings().dim());
    for (size_t i = 0; i < population.size(); ++i) {
      const auto* idx = std::get_if<DatasetIndex>(&population[i].provenance);
      std::optional<size_t> local;
      if (idx != nullptr) local = corpus->LocalIndex(idx->value);
      if (!local.has_value()) {
        return absl::InternalError("data-backend sample outside its corpus");
      }
      auto src = corpus->embeddings().row(*local);
      std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
  }
  return embedder.EmbedAll(std::span<const Sample>(population), threads);
}

absl::StatusOr<std::vector<Sample>> InitialPopulation(
    const RunConfig& config, const BackendRegistry& registry,
    std::optional<int> class_id, RngStream& rng) {
  const std::string& id = config.schedule.backend_ids[0];
  const size_t n = config.per_group();
  ASSIGN_OR_RETURN(BackendKind kind, registry.Kind(id));
  std::vector<Sample> population;
  if (kind == BackendKind::kParametric) {
    ASSIGN_OR_RETURN(const simulators::ParametricBackend* backend,
                     registry.Parametric(id));
    ASSIGN_OR_RETURN(bool pin, PinClass(config, registry, id));
    ASSIGN_OR_RETURN(population,
                     simulators::RandomApi(*backend, static_cast<int>(n),
                                           pin ? class_id : std::nullopt, rng,
                                           config.threads));
  } else {
    ASSIGN_OR_RETURN(const DataSource* source, registry.Data(id));
    ASSIGN_OR_RETURN(const data_backend::Corpus* corpus,
                     source->ForClass(class_id));
    ASSIGN_OR_RETURN(population,
                     data_backend::DataRandomApi(*corpus, n, std::nullopt, rng));
  }
  for (Sample& s : population) s.label = class_id;
  return population;
}

}  // namespace

absl::Status RunConfig::Validate(const BackendRegistry& registry) const {
  RETURN_IF_ERROR(schedule.Validate());
  if (privacy.iterations != schedule.iterations) {
    return absl::InvalidArgumentError(absl::StrCat(
        "privacy T=", privacy.iterations, " but schedule T=",
        schedule.iterations));
  }
  if (!(privacy.sigma >= 0.0) || !(privacy.threshold >= 0.0)) {
    return absl::InvalidArgumentError("sigma and threshold must be >= 0");
  }
  if (n_syn == 0 || n_syn % num_groups() != 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "n_syn=", n_syn, " must be a positive multiple of ", num_groups(),
        " classes"));
  }
  if (std::set<int>(classes.begin(), classes.end()).size() != classes.size()) {
    return absl::InvalidArgumentError("duplicate class ids");
  }
  if (threads < 1) return absl::InvalidArgumentError("threads must be >= 1");
  for (size_t t = 0; t < schedule.backend_ids.size(); ++t) {
    const std::string& id = schedule.backend_ids[t];
    ASSIGN_OR_RETURN(BackendKind kind, registry.Kind(id));
    RETURN_IF_ERROR(PinClass(*this, registry, id).status());
    if (kind == BackendKind::kData && t > 0) {
      ASSIGN_OR_RETURN(const DataSource* source, registry.Data(id));
      const int gamma = schedule.GammaAt(static_cast<int>(t));
      std::vector<std::optional<int>> groups;
      if (classes.empty()) groups.push_back(std::nullopt);
      for (int c : classes) groups.push_back(c);
      for (const auto& g : groups) {
        ASSIGN_OR_RETURN(const data_backend::Corpus* corpus,
                         source->ForClass(g));
        if (static_cast<size_t>(gamma) > corpus->k_max()) {
          return absl::InvalidArgumentError(absl::StrCat(
              "gamma ", gamma, " at iteration ", t, " exceeds the ",
              corpus->k_max(), "-neighbor table of backend '", id, "'"));
        }
      }
    }
  }
  return absl::OkStatus();
}

EmbeddingMatrix PrivateData::ForClass(std::optional<int> class_id) const {
  if (!class_id.has_value()) return embeddings;
  std::vector<size_t> rows;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == *class_id) rows.push_back(i);
  }
  EmbeddingMatrix out = embeddings.Gather(rows);
  if (out.dim() == 0) out = EmbeddingMatrix(0, embeddings.dim());
  return out;
}

absl::StatusOr<Sample> VariationDispatch(
    const Sample& sample, std::span<const double> sample_embedding,
    const std::string& backend_id, const IterationSchedule& schedule, int t,
    std::optional<int> class_id, bool pin_class,
    const BackendRegistry& registry, RngStream& rng, bool* handoff) {
  if (handoff != nullptr) *handoff = false;
  ASSIGN_OR_RETURN(BackendKind kind, registry.Kind(backend_id));
  if (kind == BackendKind::kParametric) {
    const auto* params = std::get_if<ParamVector>(&sample.provenance);
    if (params == nullptr) {
      return absl::FailedPreconditionError(absl::StrCat(
          "parametric backend '", backend_id,
          "' needs a sample with simulator parameters"));
    }
    ASSIGN_OR_RETURN(const simulators::ParametricBackend* backend,
                     registry.Parametric(backend_id));
    const std::vector<double> alpha = schedule.AlphaAt(backend->space(), t);
    const std::vector<double> beta = schedule.BetaAt(backend->space(), t);
    ASSIGN_OR_RETURN(Sample out,
                     simulators::VariationApi(*backend, *params, alpha, beta,
                                              pin_class ? class_id
                                                        : std::nullopt,
                                              rng));
    out.label = class_id;
    return out;
  }

  ASSIGN_OR_RETURN(const DataSource* source, registry.Data(backend_id));
  ASSIGN_OR_RETURN(const data_backend::Corpus* corpus,
                   source->ForClass(class_id));
  std::optional<size_t> local;
  if (const auto* idx = std::get_if<DatasetIndex>(&sample.provenance)) {
    local = corpus->LocalIndex(idx->value);
  }
  if (!local.has_value()) {
    if (sample_embedding.size() != corpus->embeddings().dim()) {
      return absl::InvalidArgumentError(
          "handoff embedding does not match the corpus dimension");
    }
    local = NearestRow(sample_embedding, corpus->embeddings());
    if (handoff != nullptr) *handoff = true;
  }
  return data_backend::DataVariationApi(
      *corpus, *local, static_cast<size_t>(schedule.GammaAt(t)), rng,
      class_id);
}

absl::StatusOr<RunResult> RunPe(const RunConfig& config,
                                const BackendRegistry& registry,
                                const PrivateData& private_data,
                                const metrics::PixelEmbedder& embedder,
                                const RunOptions& options) {
  RETURN_IF_ERROR(config.Validate(registry));
  if (!config.classes.empty()) {
    if (private_data.labels.size() != private_data.embeddings.rows()) {
      return absl::InvalidArgumentError(
          "conditional run needs one private label per sample");
    }
    for (int label : private_data.labels) {
      if (std::find(config.classes.begin(), config.classes.end(), label) ==
          config.classes.end()) {
        return absl::InvalidArgumentError(
            absl::StrCat("private label ", label, " is not a run class"));
      }
    }
  }

  const size_t groups = config.num_groups();
  const int T = config.schedule.iterations;
  const RngStream root(config.seed);
  std::vector<std::optional<int>> group_class(groups);
  std::vector<RngStream> group_rng;
  std::vector<EmbeddingMatrix> group_private;
  for (size_t g = 0; g < groups; ++g) {
    if (!config.classes.empty()) group_class[g] = config.classes[g];
    group_rng.push_back(root.Substream(
        "pe", static_cast<int64_t>(group_class[g].value_or(-1))));
    group_private.push_back(private_data.ForClass(group_class[g]));
    if (!config.classes.empty() && group_private.back().rows() == 0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "no private samples for class ", *group_class[g]));
    }
  }

  RunResult result;
  result.trace.noise_applications.assign(groups, 0);
  std::vector<IterationRecord> current(groups);
  for (size_t g = 0; g < groups; ++g) {
    IterationRecord& rec = current[g];
    rec.iteration = 0;
    rec.label = group_class[g];
    rec.backend_id = config.schedule.backend_ids[0];
    RngStream rng = group_rng[g].Substream("random");
    ASSIGN_OR_RETURN(rec.population,
                     InitialPopulation(config, registry, rec.label, rng));
    ASSIGN_OR_RETURN(rec.embeddings,
                     EmbedPopulation(rec.population, rec.backend_id, rec.label,
                                     registry, embedder, config.threads));
  }
  if (options.observer) RETURN_IF_ERROR(options.observer(0, current));

  for (int t = 1; t <= T; ++t) {
    const std::string& backend_id = config.schedule.backend_ids[t];
    ASSIGN_OR_RETURN(bool pin, PinClass(config, registry, backend_id));
    std::vector<IterationRecord> next(groups);
    for (size_t g = 0; g < groups; ++g) {
      const IterationRecord& prev = current[g];
      IterationRecord& rec = next[g];
      rec.iteration = t;
      rec.label = group_class[g];
      rec.backend_id = backend_id;

      RngStream dp_rng = group_rng[g].Substream("dp", int64_t{t});
      ASSIGN_OR_RETURN(
          dp::VoteHistogram hist,
          dp::DpNnHistogram(group_private[g], prev.embeddings,
                            config.privacy.sigma, config.privacy.threshold,
                            dp_rng, config.threads));
      ++result.trace.noise_applications[g];

      const size_t n = prev.population.size();
      if (auto p = NormalizeHistogram(hist.thresholded)) {
        rec.distribution = *std::move(p);
      } else {
        rec.distribution.assign(n, 1.0 / static_cast<double>(n));
        rec.uniform_fallback = true;
      }
      rec.histogram = std::move(hist);
      RngStream resample_rng = group_rng[g].Substream("resample", int64_t{t});
      ASSIGN_OR_RETURN(rec.parents,
                       ResampleWithReplacement(rec.distribution,
                                               config.per_group(),
                                               resample_rng));

      rec.population.resize(rec.parents.size());
      std::vector<absl::Status> errors(rec.parents.size());
      std::vector<char> moved(rec.parents.size(), 0);
      const RngStream variation_root =
          group_rng[g].Substream("variation", int64_t{t});
      ParallelFor(rec.parents.size(), config.threads, [&](size_t i) {
        RngStream rng = variation_root.Substream(static_cast<int64_t>(i));
        const size_t parent = rec.parents[i];
        bool handoff = false;
        auto out = VariationDispatch(
            prev.population[parent], prev.embeddings.row(parent), backend_id,
            config.schedule, t, rec.label, pin, registry, rng, &handoff);
        if (!out.ok()) {
          errors[i] = out.status();
          return;
        }
        rec.population[i] = *std::move(out);
        moved[i] = handoff ? 1 : 0;
      });
      for (const absl::Status& s : errors) RETURN_IF_ERROR(s);
      rec.handoffs = static_cast<size_t>(
          std::count(moved.begin(), moved.end(), char{1}));
      ASSIGN_OR_RETURN(rec.embeddings,
                       EmbedPopulation(rec.population, backend_id, rec.label,
                                       registry, embedder, config.threads));
    }
    if (options.observer) RETURN_IF_ERROR(options.observer(t, next));
    if (options.keep_trace) result.trace.records.push_back(std::move(current));
    current = std::move(next);
  }

  for (const IterationRecord& rec : current) {
    result.synthetic.insert(result.synthetic.end(), rec.population.begin(),
                            rec.population.end());
  }
  result.trace.records.push_back(std::move(current));
  return result;
}

}  // namespace privsim::engine
