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

#include "privsim/dp/nn_histogram.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privsim/core/parallel.h"

namespace privsim::dp {

int64_t VoteHistogram::num_votes() const {
  return std::accumulate(raw.begin(), raw.end(), int64_t{0});
}

absl::StatusOr<std::vector<int64_t>> RawVoteCounts(
    const EmbeddingMatrix& private_embeds, const EmbeddingMatrix& candidates,
    int threads) {
  if (candidates.empty()) {
    return absl::InvalidArgumentError("vote histogram over an empty set");
  }
  if (!private_embeds.empty() && private_embeds.dim() != candidates.dim()) {
    return absl::InvalidArgumentError(
        absl::StrCat("embedding dims differ: private ", private_embeds.dim(),
                     ", candidates ", candidates.dim()));
  }
  const size_t n = private_embeds.rows();
  const size_t workers = NumChunks(n, threads);
  std::vector<std::vector<int64_t>> partial(
      workers, std::vector<int64_t>(candidates.rows(), 0));
  ParallelChunks(n, threads, [&](size_t begin, size_t end, size_t w) {
    for (size_t i = begin; i < end; ++i) {
      ++partial[w][NearestRow(private_embeds.row(i), candidates)];
    }
  });
  std::vector<int64_t> counts(candidates.rows(), 0);
  for (const auto& p : partial) {
    for (size_t j = 0; j < counts.size(); ++j) counts[j] += p[j];
  }
  return counts;
}

absl::StatusOr<VoteHistogram> DpNnHistogram(
    const EmbeddingMatrix& private_embeds, const EmbeddingMatrix& candidates,
    double sigma, double threshold, RngStream& rng, int threads) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError(
        absl::StrCat("noise multiplier must be >= 0, got ", sigma));
  }
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) {
    return absl::InvalidArgumentError(
        absl::StrCat("threshold must be >= 0, got ", threshold));
  }
  VoteHistogram hist;
  auto raw = RawVoteCounts(private_embeds, candidates, threads);
  if (!raw.ok()) return raw.status();
  hist.raw = *std::move(raw);
  hist.noised.resize(hist.raw.size());
  hist.thresholded.resize(hist.raw.size());
  for (size_t j = 0; j < hist.raw.size(); ++j) {
    const double noise = sigma > 0.0 ? sigma * rng.Normal() : 0.0;
    hist.noised[j] = static_cast<double>(hist.raw[j]) + noise;
    hist.thresholded[j] = std::max(hist.noised[j] - threshold, 0.0);
  }
  return hist;
}

bool HistogramSensitivityCheck(const EmbeddingMatrix& private_embeds,
                               const EmbeddingMatrix& candidates) {
  const size_t n = private_embeds.rows();
  if (n == 0) return true;
  auto full = RawVoteCounts(private_embeds, candidates);
  if (!full.ok()) return false;
  std::vector<size_t> keep;
  keep.reserve(n - 1);
  for (size_t removed = 0; removed < n; ++removed) {
    keep.clear();
    for (size_t i = 0; i < n; ++i) {
      if (i != removed) keep.push_back(i);
    }
    auto reduced =
        RawVoteCounts(private_embeds.Gather(keep), candidates);
    if (!reduced.ok()) return false;
    int changed_bins = 0;
    for (size_t j = 0; j < full->size(); ++j) {
      const int64_t diff = (*full)[j] - (*reduced)[j];
      if (diff == 0) continue;
      if (diff != 1) return false;
      ++changed_bins;
    }
    if (changed_bins != 1) return false;
  }
  return true;
}

}  // namespace privsim::dp
