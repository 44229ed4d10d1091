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

#include "privsim/data_backend/baselines.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privsim/core/categorical.h"
#include "privsim/core/parallel.h"
#include "privsim/core/status_macros.h"

namespace privsim::data_backend {
namespace {

// Draws n bins from the thresholded histogram, or uniformly when it has no
// mass.
std::vector<size_t> DrawBins(const dp::VoteHistogram& hist, size_t n,
                             RngStream& rng, bool& uniform_fallback) {
  std::vector<size_t> bins;
  bins.reserve(n);
  auto sampler = CategoricalSampler::Create(hist.thresholded);
  uniform_fallback = !sampler.ok();
  for (size_t i = 0; i < n; ++i) {
    bins.push_back(uniform_fallback ? rng.UniformIndex(hist.size())
                                    : sampler->Draw(rng));
  }
  return bins;
}

}  // namespace

absl::StatusOr<BaselineSelection> BaselineDirectHistogram(
    const EmbeddingMatrix& private_embeds, const Corpus& corpus, double sigma,
    double threshold, size_t n_out, RngStream& rng, int threads) {
  if (corpus.size() == 0) return absl::InvalidArgumentError("empty corpus");
  BaselineSelection out;
  ASSIGN_OR_RETURN(out.histogram,
                   dp::DpNnHistogram(private_embeds, corpus.embeddings(),
                                     sigma, threshold, rng, threads));
  out.selected = DrawBins(out.histogram, n_out, rng, out.uniform_fallback);
  return out;
}

absl::StatusOr<BaselineSelection> BaselineClusterHistogram(
    const EmbeddingMatrix& private_embeds, const Corpus& corpus,
    size_t num_clusters, double sigma, double threshold, size_t n_out,
    RngStream& rng, int threads) {
  if (num_clusters < 1 || num_clusters > corpus.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cluster count must be in [1, ", corpus.size(), "], got ",
        num_clusters));
  }
  RngStream cluster_rng = rng.Substream("kmeans");
  ASSIGN_OR_RETURN(ClusterModel model,
                   KMeans(corpus.embeddings(), num_clusters, cluster_rng, {},
                          threads));
  std::vector<std::vector<size_t>> members = model.Members();
  std::vector<size_t> order;
  for (size_t c = 0; c < members.size(); ++c) {
    if (!members[c].empty()) order.push_back(c);
  }
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return members[a].front() < members[b].front();
  });
  std::vector<size_t> rows(order.begin(), order.end());
  const EmbeddingMatrix centers = model.centers.Gather(rows);

  BaselineSelection out;
  ASSIGN_OR_RETURN(out.histogram,
                   dp::DpNnHistogram(private_embeds, centers, sigma, threshold,
                                     rng, threads));
  std::vector<size_t> bins =
      DrawBins(out.histogram, n_out, rng, out.uniform_fallback);
  out.selected.reserve(n_out);
  for (size_t b : bins) {
    const std::vector<size_t>& cluster = members[order[b]];
    out.selected.push_back(cluster.size() == 1
                               ? cluster.front()
                               : cluster[rng.UniformIndex(cluster.size())]);
  }
  return out;
}

absl::StatusOr<std::vector<AlignmentPart>> PartitionByAlignment(
    const Corpus& corpus, const EmbeddingMatrix& private_embeds,
    size_t n_parts, int threads) {
  if (n_parts < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("n_parts must be >= 2, got ", n_parts));
  }
  const size_t m = corpus.size();
  if (m < n_parts) {
    return absl::InvalidArgumentError(
        absl::StrCat("corpus of ", m, " cannot be cut into ", n_parts));
  }
  if (private_embeds.empty() ||
      private_embeds.dim() != corpus.embeddings().dim()) {
    return absl::InvalidArgumentError("private embeddings empty or mismatched");
  }
  std::vector<double> score(m);
  ParallelFor(m, threads, [&](size_t i) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < private_embeds.rows(); ++j) {
      best = std::min(best, SquaredDistance(corpus.embeddings().row(i),
                                            private_embeds.row(j)));
    }
    score[i] = std::sqrt(best);
  });
  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return score[a] < score[b]; });
  const size_t part = m / n_parts;
  std::vector<AlignmentPart> parts(n_parts);
  for (size_t p = 0; p < n_parts; ++p) {
    const size_t begin = p * part;
    const size_t end = p + 1 == n_parts ? m : begin + part;
    parts[p].items.assign(order.begin() + begin, order.begin() + end);
    double sum = 0.0;
    for (size_t i : parts[p].items) sum += score[i];
    parts[p].mean_score = sum / static_cast<double>(parts[p].items.size());
  }
  return parts;
}

}  // namespace privsim::data_backend
