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

#include "privsim/data_backend/corpus.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privsim/core/parallel.h"
#include "privsim/core/status_macros.h"

namespace privsim::data_backend {

absl::StatusOr<KnnTable> BuildKnnTable(const EmbeddingMatrix& embeddings,
                                       size_t k_max, int threads) {
  const size_t m = embeddings.rows();
  if (m == 0) return absl::InvalidArgumentError("empty corpus");
  if (k_max < 1 || k_max > m) {
    return absl::InvalidArgumentError(
        absl::StrCat("k_max must be in [1, ", m, "], got ", k_max));
  }
  if (m > std::numeric_limits<uint32_t>::max()) {
    return absl::InvalidArgumentError("corpus too large");
  }
  KnnTable table;
  table.rows = m;
  table.k_max = k_max;
  table.indices.resize(m * k_max);
  using Entry = std::pair<double, uint32_t>;
  ParallelChunks(m, threads, [&](size_t begin, size_t end, size_t) {
    std::vector<Entry> heap;  // max-heap on (distance, index)
    heap.reserve(k_max);
    for (size_t i = begin; i < end; ++i) {
      heap.clear();
      const size_t keep = k_max - 1;
      if (keep > 0) {
        auto query = embeddings.row(i);
        for (size_t j = 0; j < m; ++j) {
          if (j == i) continue;
          const Entry e{SquaredDistance(query, embeddings.row(j)),
                        static_cast<uint32_t>(j)};
          if (heap.size() < keep) {
            heap.push_back(e);
            std::push_heap(heap.begin(), heap.end());
          } else if (e < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = e;
            std::push_heap(heap.begin(), heap.end());
          }
        }
        std::sort_heap(heap.begin(), heap.end());
      }
      uint32_t* out = table.indices.data() + i * k_max;
      out[0] = static_cast<uint32_t>(i);
      for (size_t r = 0; r < heap.size(); ++r) out[r + 1] = heap[r].second;
    }
  });
  return table;
}

Corpus::Corpus(std::vector<Sample> samples, EmbeddingMatrix embeddings,
               KnnTable knn, std::vector<int64_t> global_ids)
    : samples_(std::move(samples)),
      embeddings_(std::move(embeddings)),
      knn_(std::move(knn)),
      global_ids_(std::move(global_ids)) {
  local_.reserve(global_ids_.size());
  for (size_t i = 0; i < global_ids_.size(); ++i) local_[global_ids_[i]] = i;
}

absl::StatusOr<Corpus> Corpus::Build(std::vector<Sample> samples,
                                     EmbeddingMatrix embeddings, size_t k_max,
                                     int threads,
                                     std::vector<int64_t> global_ids) {
  if (samples.size() != embeddings.rows()) {
    return absl::InvalidArgumentError(absl::StrCat(
        samples.size(), " samples but ", embeddings.rows(), " embeddings"));
  }
  ASSIGN_OR_RETURN(KnnTable knn, BuildKnnTable(embeddings, k_max, threads));
  return FromParts(std::move(samples), std::move(embeddings), std::move(knn),
                   std::move(global_ids));
}

absl::StatusOr<Corpus> Corpus::FromParts(std::vector<Sample> samples,
                                         EmbeddingMatrix embeddings,
                                         KnnTable knn,
                                         std::vector<int64_t> global_ids) {
  const size_t m = samples.size();
  if (m == 0) return absl::InvalidArgumentError("empty corpus");
  if (embeddings.rows() != m || knn.rows != m || knn.k_max < 1 ||
      knn.k_max > m || knn.indices.size() != m * knn.k_max) {
    return absl::InvalidArgumentError("corpus parts have inconsistent sizes");
  }
  for (size_t i = 0; i < m; ++i) {
    auto row = knn.row(i);
    if (row[0] != i) {
      return absl::InvalidArgumentError(
          absl::StrCat("neighbor row ", i, " does not start with itself"));
    }
    for (uint32_t j : row) {
      if (j >= m) return absl::InvalidArgumentError("neighbor out of range");
    }
  }
  if (global_ids.empty()) {
    global_ids.resize(m);
    std::iota(global_ids.begin(), global_ids.end(), int64_t{0});
  } else if (global_ids.size() != m) {
    return absl::InvalidArgumentError("global id count mismatch");
  }
  for (size_t i = 0; i < m; ++i) {
    samples[i].provenance = DatasetIndex{global_ids[i]};
  }
  return Corpus(std::move(samples), std::move(embeddings), std::move(knn),
                std::move(global_ids));
}

std::optional<size_t> Corpus::LocalIndex(int64_t global_id) const {
  auto it = local_.find(global_id);
  if (it == local_.end()) return std::nullopt;
  return it->second;
}

bool Corpus::labeled() const {
  return std::all_of(samples_.begin(), samples_.end(),
                     [](const Sample& s) { return s.label.has_value(); });
}

std::vector<size_t> Corpus::ItemsWithLabel(int label) const {
  std::vector<size_t> items;
  for (size_t i = 0; i < samples_.size(); ++i) {
    if (samples_[i].label == label) items.push_back(i);
  }
  return items;
}

absl::StatusOr<Corpus> Corpus::Subset(std::span<const size_t> items,
                                      size_t k_max, int threads) const {
  if (items.empty()) return absl::InvalidArgumentError("empty subset");
  std::vector<Sample> samples;
  std::vector<int64_t> ids;
  samples.reserve(items.size());
  ids.reserve(items.size());
  for (size_t i : items) {
    if (i >= size()) return absl::OutOfRangeError("subset index out of range");
    samples.push_back(samples_[i]);
    ids.push_back(global_ids_[i]);
  }
  return Build(std::move(samples), embeddings_.Gather(items),
               std::min(k_max, items.size()), threads, std::move(ids));
}

absl::StatusOr<Corpus> Corpus::ClassSlice(int label, size_t k_max,
                                          int threads) const {
  std::vector<size_t> items = ItemsWithLabel(label);
  if (items.empty()) {
    return absl::FailedPreconditionError(
        absl::StrCat("no corpus items with label ", label));
  }
  return Subset(items, k_max, threads);
}

Sample Corpus::MakeSample(size_t i, std::optional<int> label) const {
  Sample s;
  s.image = samples_[i].image;
  s.label = label;
  s.provenance = DatasetIndex{global_ids_[i]};
  return s;
}

absl::StatusOr<std::vector<size_t>> DataRandomIndices(
    const Corpus& corpus, size_t n, std::optional<int> class_id,
    RngStream& rng) {
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  std::vector<size_t> out;
  out.reserve(n);
  if (!class_id.has_value()) {
    for (size_t i = 0; i < n; ++i) out.push_back(rng.UniformIndex(corpus.size()));
    return out;
  }
  if (!corpus.labeled()) {
    return absl::FailedPreconditionError(
        "class filter requested on an unlabeled corpus");
  }
  std::vector<size_t> slice = corpus.ItemsWithLabel(*class_id);
  if (slice.empty()) {
    return absl::FailedPreconditionError(
        absl::StrCat("empty class slice for class ", *class_id));
  }
  for (size_t i = 0; i < n; ++i) {
    out.push_back(slice[rng.UniformIndex(slice.size())]);
  }
  return out;
}

absl::StatusOr<size_t> DataVariationIndex(const Corpus& corpus, size_t index,
                                          size_t gamma, RngStream& rng) {
  if (index >= corpus.size()) {
    return absl::OutOfRangeError(absl::StrCat("index ", index, " >= ",
                                              corpus.size()));
  }
  if (gamma < 1 || gamma > corpus.k_max()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "gamma must be in [1, ", corpus.k_max(), "], got ", gamma));
  }
  return corpus.neighbors(index)[rng.UniformIndex(gamma)];
}

absl::StatusOr<std::vector<Sample>> DataRandomApi(const Corpus& corpus,
                                                  size_t n,
                                                  std::optional<int> class_id,
                                                  RngStream& rng) {
  ASSIGN_OR_RETURN(std::vector<size_t> idx,
                   DataRandomIndices(corpus, n, class_id, rng));
  std::vector<Sample> out;
  out.reserve(n);
  for (size_t i : idx) out.push_back(corpus.MakeSample(i, class_id));
  return out;
}

absl::StatusOr<Sample> DataVariationApi(const Corpus& corpus, size_t index,
                                        size_t gamma, RngStream& rng,
                                        std::optional<int> label) {
  ASSIGN_OR_RETURN(size_t j, DataVariationIndex(corpus, index, gamma, rng));
  return corpus.MakeSample(j, label);
}

}  // namespace privsim::data_backend
