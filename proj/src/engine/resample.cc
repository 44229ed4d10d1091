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

#include "privsim/engine/resample.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privsim/core/categorical.h"
#include "privsim/core/status_macros.h"

namespace privsim::engine {

std::optional<std::vector<double>> NormalizeHistogram(
    std::span<const double> histogram) {
  double total = 0.0;
  for (double v : histogram) total += v;
  if (!(total > 0.0)) return std::nullopt;
  std::vector<double> p(histogram.begin(), histogram.end());
  for (double& v : p) v /= total;
  return p;
}

absl::StatusOr<std::vector<size_t>> ResampleWithReplacement(
    std::span<const double> distribution, size_t n, RngStream& rng) {
  double total = 0.0;
  for (size_t i = 0; i < distribution.size(); ++i) {
    if (!(distribution[i] >= 0.0) || !std::isfinite(distribution[i])) {
      return absl::InvalidArgumentError(absl::StrCat(
          "invalid probability ", distribution[i], " at ", i));
    }
    total += distribution[i];
  }
  if (std::abs(total - 1.0) > kDistributionTolerance) {
    return absl::InvalidArgumentError(
        absl::StrCat("distribution sums to ", total));
  }
  ASSIGN_OR_RETURN(CategoricalSampler sampler,
                   CategoricalSampler::Create(distribution));
  std::vector<size_t> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) out.push_back(sampler.Draw(rng));
  return out;
}

}  // namespace privsim::engine
