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

// One-shot selection baselines over a fixed corpus, plus the partition of a
// corpus by distance to the private data.

#ifndef PRIVSIM_DATA_BACKEND_BASELINES_H_
#define PRIVSIM_DATA_BACKEND_BASELINES_H_

#include <vector>

#include "absl/status/statusor.h"
#include "privsim/core/embedding_matrix.h"
#include "privsim/core/rng.h"
#include "privsim/data_backend/corpus.h"
#include "privsim/data_backend/kmeans.h"
#include "privsim/dp/nn_histogram.h"

namespace privsim::data_backend {

struct BaselineSelection {
  std::vector<size_t> selected;  // local corpus indices, with repeats
  dp::VoteHistogram histogram;
  bool uniform_fallback = false;
};

// Private samples vote for their nearest corpus item; n_out items are drawn
// with replacement from the normalized noisy histogram.
absl::StatusOr<BaselineSelection> BaselineDirectHistogram(
    const EmbeddingMatrix& private_embeds, const Corpus& corpus, double sigma,
    double threshold, size_t n_out, RngStream& rng, int threads = 1);

// Votes go to k-means centers instead; each draw then picks a uniform member
// of the drawn cluster. Clustering uses rng.Substream("kmeans") so the main
// stream sees the same draws as the direct baseline. Empty clusters are
// dropped and the remaining ones ordered by their smallest member.
absl::StatusOr<BaselineSelection> BaselineClusterHistogram(
    const EmbeddingMatrix& private_embeds, const Corpus& corpus,
    size_t num_clusters, double sigma, double threshold, size_t n_out,
    RngStream& rng, int threads = 1);

struct AlignmentPart {
  std::vector<size_t> items;  // local corpus indices
  double mean_score = 0.0;
};

// Scores every item by Euclidean distance to its nearest private embedding,
// sorts ascending and cuts into n_parts contiguous parts of size
// m / n_parts (the remainder goes to the last part).
absl::StatusOr<std::vector<AlignmentPart>> PartitionByAlignment(
    const Corpus& corpus, const EmbeddingMatrix& private_embeds,
    size_t n_parts, int threads = 1);

}  // namespace privsim::data_backend

#endif  // PRIVSIM_DATA_BACKEND_BASELINES_H_
