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

#ifndef PRIVSIM_ENGINE_RESAMPLE_H_
#define PRIVSIM_ENGINE_RESAMPLE_H_

#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "privsim/core/rng.h"

namespace privsim::engine {

inline constexpr double kDistributionTolerance = 1e-9;

// histogram / sum(histogram), or nullopt when the histogram has no mass.
std::optional<std::vector<double>> NormalizeHistogram(
    std::span<const double> histogram);

// n i.i.d. indices drawn from `distribution`, which must be non-negative and
// sum to 1 within kDistributionTolerance.
absl::StatusOr<std::vector<size_t>> ResampleWithReplacement(
    std::span<const double> distribution, size_t n, RngStream& rng);

template <typename T>
absl::StatusOr<std::vector<T>> ResampleWithReplacement(
    std::span<const T> population, std::span<const double> distribution,
    size_t n, RngStream& rng) {
  if (population.size() != distribution.size()) {
    return absl::InvalidArgumentError("population/distribution size mismatch");
  }
  auto idx = ResampleWithReplacement(distribution, n, rng);
  if (!idx.ok()) return idx.status();
  std::vector<T> out;
  out.reserve(n);
  for (size_t i : *idx) out.push_back(population[i]);
  return out;
}

}  // namespace privsim::engine

#endif  // PRIVSIM_ENGINE_RESAMPLE_H_
