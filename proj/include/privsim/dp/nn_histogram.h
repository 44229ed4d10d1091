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

// Differentially private nearest-neighbor vote histogram.
//
// Every private embedding votes for its nearest candidate (squared Euclidean
// distance, lowest index on ties). Under add/remove-one neighboring datasets
// the raw count vector has L2 sensitivity 1, so adding N(0, sigma^2 I) noise
// gives a Gaussian mechanism with noise multiplier sigma. The threshold H is
// subtracted afterwards and negative bins are clipped to zero.

#ifndef PRIVSIM_DP_NN_HISTOGRAM_H_
#define PRIVSIM_DP_NN_HISTOGRAM_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "privsim/core/embedding_matrix.h"
#include "privsim/core/rng.h"

namespace privsim::dp {

struct VoteHistogram {
  std::vector<int64_t> raw;
  std::vector<double> noised;
  // max(noised - H, 0), elementwise.
  std::vector<double> thresholded;

  size_t size() const { return raw.size(); }
  int64_t num_votes() const;
};

// Vote counts only (no noise). Voting is split across `threads` workers with
// per-worker partial histograms summed in worker order.
absl::StatusOr<std::vector<int64_t>> RawVoteCounts(
    const EmbeddingMatrix& private_embeds, const EmbeddingMatrix& candidates,
    int threads = 1);

// Noise is drawn from `rng` in bin order on a single thread, so the result
// depends only on the inputs and the stream.
absl::StatusOr<VoteHistogram> DpNnHistogram(
    const EmbeddingMatrix& private_embeds, const EmbeddingMatrix& candidates,
    double sigma, double threshold, RngStream& rng, int threads = 1);

// Recomputes the raw histogram with each private sample removed in turn and
// checks that exactly one bin changes, by exactly one. Vacuously true for an
// empty private set. Cost is O(n^2 m d); meant for tests and audits.
bool HistogramSensitivityCheck(const EmbeddingMatrix& private_embeds,
                               const EmbeddingMatrix& candidates);

}  // namespace privsim::dp

#endif  // PRIVSIM_DP_NN_HISTOGRAM_H_
