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

#ifndef PRIVSIM_DATA_BACKEND_KMEANS_H_
#define PRIVSIM_DATA_BACKEND_KMEANS_H_

#include <vector>

#include "absl/status/statusor.h"
#include "privsim/core/embedding_matrix.h"
#include "privsim/core/rng.h"

namespace privsim::data_backend {

struct KMeansOptions {
  int max_iterations = 50;
  double relative_tolerance = 1e-6;
};

struct ClusterModel {
  EmbeddingMatrix centers;
  std::vector<size_t> assignment;  // nearest center per item
  double inertia = 0.0;
  int iterations = 0;

  std::vector<std::vector<size_t>> Members() const;
};

// k-means++ seeding followed by Lloyd iterations. A cluster that loses all
// its members keeps its previous center.
absl::StatusOr<ClusterModel> KMeans(const EmbeddingMatrix& points, size_t k,
                                    RngStream& rng,
                                    const KMeansOptions& options = {},
                                    int threads = 1);

}  // namespace privsim::data_backend

#endif  // PRIVSIM_DATA_BACKEND_KMEANS_H_
