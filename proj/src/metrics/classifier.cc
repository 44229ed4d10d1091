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

#include "privsim/metrics/classifier.h"

#include <algorithm>
#include <map>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privsim/core/parallel.h"
#include "privsim/core/status_macros.h"
#include "privsim/dp/report_noisy_max.h"

namespace privsim::metrics {

absl::StatusOr<std::vector<int>> NnPredict(const EmbeddingMatrix& train,
                                           std::span<const int> train_labels,
                                           const EmbeddingMatrix& test, int k,
                                           int threads) {
  if (train.empty()) return absl::InvalidArgumentError("empty training set");
  if (train_labels.size() != train.rows()) {
    return absl::InvalidArgumentError("train labels do not match rows");
  }
  if (k < 1 || k % 2 == 0) {
    return absl::InvalidArgumentError(absl::StrCat("k must be odd, got ", k));
  }
  if (test.dim() != train.dim() && !test.empty()) {
    return absl::InvalidArgumentError("train/test dimensions differ");
  }
  const size_t kk = std::min<size_t>(k, train.rows());
  std::vector<int> predictions(test.rows());
  ParallelChunks(test.rows(), threads, [&](size_t begin, size_t end, size_t) {
    std::vector<std::pair<double, int>> ranked(train.rows());
    std::map<int, int> votes;
    for (size_t i = begin; i < end; ++i) {
      for (size_t j = 0; j < train.rows(); ++j) {
        ranked[j] = {SquaredDistance(test.row(i), train.row(j)),
                     train_labels[j]};
      }
      std::partial_sort(ranked.begin(), ranked.begin() + kk, ranked.end());
      votes.clear();
      for (size_t j = 0; j < kk; ++j) ++votes[ranked[j].second];
      int best_label = 0, best_votes = -1;
      for (const auto& [label, count] : votes) {
        if (count > best_votes) {  // map order: lowest label wins ties.
          best_label = label;
          best_votes = count;
        }
      }
      predictions[i] = best_label;
    }
  });
  return predictions;
}

absl::StatusOr<double> NnClassifierAccuracy(
    const EmbeddingMatrix& train, std::span<const int> train_labels,
    const EmbeddingMatrix& test, std::span<const int> test_labels, int k,
    int threads) {
  if (test.empty()) return absl::InvalidArgumentError("empty test set");
  if (test_labels.size() != test.rows()) {
    return absl::InvalidArgumentError("test labels do not match rows");
  }
  ASSIGN_OR_RETURN(std::vector<int> predicted,
                   NnPredict(train, train_labels, test, k, threads));
  size_t correct = 0;
  for (size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == test_labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.rows());
}

absl::StatusOr<size_t> DpModelSelect(std::span<const ModelCandidate> candidates,
                                     size_t validation_size,
                                     double epsilon_select, RngStream& rng) {
  if (candidates.empty()) return absl::InvalidArgumentError("no candidates");
  if (validation_size == 0) {
    return absl::InvalidArgumentError("empty validation set");
  }
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const ModelCandidate& c : candidates) {
    scores.push_back(c.validation_accuracy);
  }
  return dp::ReportNoisyMax(scores, 1.0 / static_cast<double>(validation_size),
                            epsilon_select, rng);
}

}  // namespace privsim::metrics
