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

#include "privsim/core/categorical.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace privsim {

absl::StatusOr<CategoricalSampler> CategoricalSampler::Create(
    std::span<const double> weights) {
  if (weights.empty()) return absl::InvalidArgumentError("no categories");
  std::vector<double> cumulative;
  cumulative.reserve(weights.size());
  double total = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (!std::isfinite(w) || w < 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("invalid weight ", w, " at ", i));
    }
    total += w;
    cumulative.push_back(total);
  }
  if (!(total > 0.0)) return absl::InvalidArgumentError("weights sum to 0");
  return CategoricalSampler(std::move(cumulative));
}

size_t CategoricalSampler::Draw(RngStream& rng) const {
  const double u = rng.Uniform01() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;  // u rounded up to the total.
  // Never land on a zero-weight trailing entry.
  size_t i = static_cast<size_t>(it - cumulative_.begin());
  while (i > 0 && cumulative_[i] == cumulative_[i - 1]) --i;
  return i;
}

}  // namespace privsim
