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

// A fixed simulator-generated dataset with an exact nearest-neighbor table,
// and the data-access generation APIs over it.

#ifndef PRIVSIM_DATA_BACKEND_CORPUS_H_
#define PRIVSIM_DATA_BACKEND_CORPUS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/statusor.h"
#include "privsim/core/embedding_matrix.h"
#include "privsim/core/rng.h"
#include "privsim/core/sample.h"

namespace privsim::data_backend {

// Row i lists the k_max nearest items to i: i itself first, then the rest by
// (squared distance, index).
struct KnnTable {
  size_t rows = 0;
  size_t k_max = 0;
  std::vector<uint32_t> indices;

  std::span<const uint32_t> row(size_t i) const {
    return {indices.data() + i * k_max, k_max};
  }
  friend bool operator==(const KnnTable&, const KnnTable&) = default;
};

absl::StatusOr<KnnTable> BuildKnnTable(const EmbeddingMatrix& embeddings,
                                       size_t k_max, int threads = 1);

class Corpus {
 public:
  // samples may carry empty images when only embeddings matter. Items keep
  // their position as DatasetIndex unless global_ids is given.
  static absl::StatusOr<Corpus> Build(std::vector<Sample> samples,
                                      EmbeddingMatrix embeddings, size_t k_max,
                                      int threads = 1,
                                      std::vector<int64_t> global_ids = {});

  // Same as Build with a precomputed (for example cached) table.
  static absl::StatusOr<Corpus> FromParts(std::vector<Sample> samples,
                                          EmbeddingMatrix embeddings,
                                          KnnTable knn,
                                          std::vector<int64_t> global_ids = {});

  size_t size() const { return samples_.size(); }
  size_t k_max() const { return knn_.k_max; }
  const std::vector<Sample>& samples() const { return samples_; }
  const EmbeddingMatrix& embeddings() const { return embeddings_; }
  const KnnTable& knn() const { return knn_; }
  std::span<const uint32_t> neighbors(size_t i) const { return knn_.row(i); }

  int64_t global_id(size_t i) const { return global_ids_[i]; }
  std::optional<size_t> LocalIndex(int64_t global_id) const;

  // True when every item has a label.
  bool labeled() const;
  std::vector<size_t> ItemsWithLabel(int label) const;

  // Sub-corpus over the given items with its own neighbor table. Global ids
  // are preserved.
  absl::StatusOr<Corpus> Subset(std::span<const size_t> items, size_t k_max,
                                int threads = 1) const;
  absl::StatusOr<Corpus> ClassSlice(int label, size_t k_max,
                                    int threads = 1) const;

  // Copy of item i with DatasetIndex provenance and the given label.
  Sample MakeSample(size_t i, std::optional<int> label) const;

 private:
  Corpus(std::vector<Sample> samples, EmbeddingMatrix embeddings, KnnTable knn,
         std::vector<int64_t> global_ids);

  std::vector<Sample> samples_;
  EmbeddingMatrix embeddings_;
  KnnTable knn_;
  std::vector<int64_t> global_ids_;
  absl::flat_hash_map<int64_t, size_t> local_;
};

// Uniform local indices over the corpus, or over the items labeled class_id.
absl::StatusOr<std::vector<size_t>> DataRandomIndices(
    const Corpus& corpus, size_t n, std::optional<int> class_id,
    RngStream& rng);

// Uniform over the first gamma entries of the neighbor row of index.
absl::StatusOr<size_t> DataVariationIndex(const Corpus& corpus, size_t index,
                                          size_t gamma, RngStream& rng);

// Sample-level wrappers; returned samples carry DatasetIndex provenance and
// class_id as label.
absl::StatusOr<std::vector<Sample>> DataRandomApi(const Corpus& corpus,
                                                  size_t n,
                                                  std::optional<int> class_id,
                                                  RngStream& rng);
absl::StatusOr<Sample> DataVariationApi(const Corpus& corpus, size_t index,
                                        size_t gamma, RngStream& rng,
                                        std::optional<int> label = {});

}  // namespace privsim::data_backend

#endif  // PRIVSIM_DATA_BACKEND_CORPUS_H_
