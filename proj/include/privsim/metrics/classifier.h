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

#ifndef PRIVSIM_METRICS_CLASSIFIER_H_
#define PRIVSIM_METRICS_CLASSIFIER_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privsim/core/embedding_matrix.h"
#include "privsim/core/rng.h"

namespace privsim::metrics {

inline constexpr int kDefaultNeighbors = 5;

// k-NN majority vote. Neighbors are ranked by (squared distance, label), so
// the prediction does not depend on training order; vote ties go to the
// lowest label.
absl::StatusOr<std::vector<int>> NnPredict(const EmbeddingMatrix& train,
                                           std::span<const int> train_labels,
                                           const EmbeddingMatrix& test, int k,
                                           int threads = 1);

absl::StatusOr<double> NnClassifierAccuracy(
    const EmbeddingMatrix& train, std::span<const int> train_labels,
    const EmbeddingMatrix& test, std::span<const int> test_labels,
    int k = kDefaultNeighbors, int threads = 1);

struct ModelCandidate {
  std::string config;
  double validation_accuracy = 0.0;
};

// Report Noisy Max over validation accuracies; one validation record changes
// an accuracy by at most 1 / validation_size.
absl::StatusOr<size_t> DpModelSelect(std::span<const ModelCandidate> candidates,
                                     size_t validation_size,
                                     double epsilon_select, RngStream& rng);

}  // namespace privsim::metrics

#endif  // PRIVSIM_METRICS_CLASSIFIER_H_
