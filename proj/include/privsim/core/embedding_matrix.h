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

#ifndef PRIVSIM_CORE_EMBEDDING_MATRIX_H_
#define PRIVSIM_CORE_EMBEDDING_MATRIX_H_

#include <cstddef>
#include <span>
#include <vector>

namespace privsim {

// Dense row-major n x d matrix of embeddings, one row per sample.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(size_t rows, size_t dim)
      : rows_(rows), dim_(dim), data_(rows * dim, 0.0) {}
  EmbeddingMatrix(size_t rows, size_t dim, std::vector<double> data)
      : rows_(rows), dim_(dim), data_(std::move(data)) {}

  size_t rows() const { return rows_; }
  size_t dim() const { return dim_; }
  bool empty() const { return rows_ == 0; }

  std::span<const double> row(size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<double> row(size_t i) { return {data_.data() + i * dim_, dim_}; }

  const std::vector<double>& data() const { return data_; }

  void AppendRow(std::span<const double> values);

  // Rows selected by index, in the given order.
  EmbeddingMatrix Gather(std::span<const size_t> indices) const;

  friend bool operator==(const EmbeddingMatrix&,
                         const EmbeddingMatrix&) = default;

 private:
  size_t rows_ = 0;
  size_t dim_ = 0;
  std::vector<double> data_;
};

// Squared Euclidean distance. Summation order is fixed, so equal inputs give
// bit-identical results regardless of caller.
double SquaredDistance(std::span<const double> a, std::span<const double> b);

// Index of the row of `candidates` closest to `query`; ties go to the lowest
// index. Requires candidates to be non-empty.
size_t NearestRow(std::span<const double> query,
                  const EmbeddingMatrix& candidates);

// NearestRow for every row of `queries`.
std::vector<size_t> NearestRows(const EmbeddingMatrix& queries,
                                const EmbeddingMatrix& candidates,
                                int threads = 1);

}  // namespace privsim

#endif  // PRIVSIM_CORE_EMBEDDING_MATRIX_H_
