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

// The Private Evolution loop, run separately for every class c:
//
//   S_0 = RANDOM_API(N_syn / |C|)
//   for t = 1..T:
//     h   = DP nearest-neighbor histogram of class-c private data on S_{t-1}
//     P_t = h / sum(h)                       (uniform if sum(h) == 0)
//     S'  = N_syn / |C| draws from S_{t-1} with replacement under P_t
//     S_t = VARIATION_API(S') on the backend scheduled for iteration t
//
// Classes advance in lockstep so an observer sees every class at iteration t
// together.

#ifndef PRIVSIM_ENGINE_RUN_PE_H_
#define PRIVSIM_ENGINE_RUN_PE_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privsim/core/embedding_matrix.h"
#include "privsim/core/privacy_spec.h"
#include "privsim/core/rng.h"
#include "privsim/core/sample.h"
#include "privsim/core/schedule.h"
#include "privsim/dp/nn_histogram.h"
#include "privsim/engine/backend_registry.h"
#include "privsim/metrics/embedding.h"

namespace privsim::engine {

enum class ClassMode {
  kAuto,         // pin the class parameter when the backend has one
  kAvailable,    // require and pin the class parameter
  kUnavailable,  // never pin; labels come from the loop class only
};

struct RunConfig {
  // sigma and threshold are used as given; calibration happens upstream.
  PrivacySpec privacy;
  IterationSchedule schedule;
  size_t n_syn = 0;
  // Empty for unconditional generation (one group, unlabeled output).
  std::vector<int> classes;
  ClassMode class_mode = ClassMode::kAuto;
  uint64_t seed = 0;
  int threads = 1;

  size_t num_groups() const { return classes.empty() ? 1 : classes.size(); }
  size_t per_group() const { return n_syn / num_groups(); }

  absl::Status Validate(const BackendRegistry& registry) const;
};

struct PrivateData {
  EmbeddingMatrix embeddings;
  // One label per row for conditional runs; empty otherwise.
  std::vector<int> labels;

  // Rows labeled class_id (every row when class_id is empty).
  EmbeddingMatrix ForClass(std::optional<int> class_id) const;
};

struct IterationRecord {
  int iteration = 0;
  std::optional<int> label;
  std::string backend_id;
  std::vector<Sample> population;  // S_t
  EmbeddingMatrix embeddings;      // embeddings of S_t
  // Iterations >= 1: the vote on S_{t-1} and the resampling it drove.
  std::optional<dp::VoteHistogram> histogram;
  std::vector<double> distribution;  // P_t
  std::vector<size_t> parents;       // indices into S_{t-1}
  bool uniform_fallback = false;
  // Samples moved from a parametric backend onto a corpus this iteration.
  size_t handoffs = 0;
};

struct GenerationTrace {
  // records[t][g]: group g (class index) at iteration t.
  std::vector<std::vector<IterationRecord>> records;
  // DP histogram releases per group; T for every group of a full run.
  std::vector<int> noise_applications;
};

struct RunResult {
  std::vector<Sample> synthetic;  // final populations, grouped by class
  GenerationTrace trace;
};

using IterationObserver =
    std::function<absl::Status(int t, std::span<const IterationRecord>)>;

struct RunOptions {
  // Keep populations and embeddings of every iteration in the trace. When
  // false only the last iteration is retained.
  bool keep_trace = true;
  IterationObserver observer;
};

// Routes one resampled sample to the iteration-t backend. Parametric
// backends need SimulatorParams provenance. A data backend accepts
// DatasetIndex samples of its own corpus; any other sample is first moved to
// the corpus item nearest its embedding (`handoff` is then set).
absl::StatusOr<Sample> VariationDispatch(
    const Sample& sample, std::span<const double> sample_embedding,
    const std::string& backend_id, const IterationSchedule& schedule, int t,
    std::optional<int> class_id, bool pin_class,
    const BackendRegistry& registry, RngStream& rng, bool* handoff = nullptr);

absl::StatusOr<RunResult> RunPe(const RunConfig& config,
                                const BackendRegistry& registry,
                                const PrivateData& private_data,
                                const metrics::PixelEmbedder& embedder,
                                const RunOptions& options = {});

}  // namespace privsim::engine

#endif  // PRIVSIM_ENGINE_RUN_PE_H_
