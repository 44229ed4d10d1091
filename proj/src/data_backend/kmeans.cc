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

#include "privsim/data_backend/kmeans.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privsim/core/categorical.h"
#include "privsim/core/parallel.h"
#include "privsim/core/status_macros.h"

namespace privsim::data_backend {
namespace {

// Nearest center per point; returns the total squared distance.
double Assign(const EmbeddingMatrix& points, const EmbeddingMatrix& centers,
              std::vector<size_t>& assignment, int threads) {
  std::vector<double> dist(points.rows());
  ParallelFor(points.rows(), threads, [&](size_t i) {
    size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t c = 0; c < centers.rows(); ++c) {
      const double d = SquaredDistance(points.row(i), centers.row(c));
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    assignment[i] = best;
    dist[i] = best_d;
  });
  double inertia = 0.0;
  for (double d : dist) inertia += d;
  return inertia;
}

}  // namespace

std::vector<std::vector<size_t>> ClusterModel::Members() const {
  std::vector<std::vector<size_t>> members(centers.rows());
  for (size_t i = 0; i < assignment.size(); ++i) {
    members[assignment[i]].push_back(i);
  }
  return members;
}

absl::StatusOr<ClusterModel> KMeans(const EmbeddingMatrix& points, size_t k,
                                    RngStream& rng,
                                    const KMeansOptions& options,
                                    int threads) {
  const size_t m = points.rows(), d = points.dim();
  if (k < 1 || k > m) {
    return absl::InvalidArgumentError(
        absl::StrCat("cluster count must be in [1, ", m, "], got ", k));
  }
  ClusterModel model;
  model.centers = EmbeddingMatrix(k, d);

  // k-means++: first center uniform, then proportional to squared distance
  // from the closest chosen center.
  std::vector<double> closest(m, std::numeric_limits<double>::infinity());
  size_t pick = rng.UniformIndex(m);
  for (size_t c = 0; c < k; ++c) {
    std::copy(points.row(pick).begin(), points.row(pick).end(),
              model.centers.row(c).begin());
    if (c + 1 == k) break;
    ParallelFor(m, threads, [&](size_t i) {
      closest[i] = std::min(closest[i],
                            SquaredDistance(points.row(i), points.row(pick)));
    });
    auto sampler = CategoricalSampler::Create(closest);
    // All remaining mass zero (duplicates): fall back to a uniform pick.
    pick = sampler.ok() ? sampler->Draw(rng) : rng.UniformIndex(m);
  }

  model.assignment.assign(m, 0);
  model.inertia = Assign(points, model.centers, model.assignment, threads);
  std::vector<double> sums(k * d);
  std::vector<size_t> counts(k);
  for (model.iterations = 0; model.iterations < options.max_iterations;) {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (size_t i = 0; i < m; ++i) {
      const size_t c = model.assignment[i];
      ++counts[c];
      auto r = points.row(i);
      for (size_t j = 0; j < d; ++j) sums[c * d + j] += r[j];
    }
    for (size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      auto center = model.centers.row(c);
      for (size_t j = 0; j < d; ++j) {
        center[j] = sums[c * d + j] / static_cast<double>(counts[c]);
      }
    }
    const double previous = model.inertia;
    model.inertia = Assign(points, model.centers, model.assignment, threads);
    ++model.iterations;
    if (std::abs(previous - model.inertia) <=
        options.relative_tolerance * std::max(previous, 1e-300)) {
      break;
    }
  }
  return model;
}

}  // namespace privsim::data_backend
