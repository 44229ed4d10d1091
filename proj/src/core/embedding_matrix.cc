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

#include "privsim/core/embedding_matrix.h"

#include <cassert>

#include "privsim/core/parallel.h"

namespace privsim {

void EmbeddingMatrix::AppendRow(std::span<const double> values) {
  if (rows_ == 0 && dim_ == 0) dim_ = values.size();
  assert(values.size() == dim_);
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

EmbeddingMatrix EmbeddingMatrix::Gather(
    std::span<const size_t> indices) const {
  EmbeddingMatrix out(indices.size(), dim_);
  for (size_t i = 0; i < indices.size(); ++i) {
    const auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  // Four independent accumulators; the reduction order is part of the
  // contract (see header).
  const size_t n = a.size();
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double d0 = a[i] - b[i];
    const double d1 = a[i + 1] - b[i + 1];
    const double d2 = a[i + 2] - b[i + 2];
    const double d3 = a[i + 3] - b[i + 3];
    s0 += d0 * d0;
    s1 += d1 * d1;
    s2 += d2 * d2;
    s3 += d3 * d3;
  }
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s0 += d * d;
  }
  return (s0 + s1) + (s2 + s3);
}

size_t NearestRow(std::span<const double> query,
                  const EmbeddingMatrix& candidates) {
  size_t best = 0;
  double best_dist = SquaredDistance(query, candidates.row(0));
  for (size_t j = 1; j < candidates.rows(); ++j) {
    const double d = SquaredDistance(query, candidates.row(j));
    if (d < best_dist) {
      best_dist = d;
      best = j;
    }
  }
  return best;
}

std::vector<size_t> NearestRows(const EmbeddingMatrix& queries,
                                const EmbeddingMatrix& candidates,
                                int threads) {
  std::vector<size_t> out(queries.rows());
  ParallelFor(queries.rows(), threads, [&](size_t i) {
    out[i] = NearestRow(queries.row(i), candidates);
  });
  return out;
}

}  // namespace privsim
