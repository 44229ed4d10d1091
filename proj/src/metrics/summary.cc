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

#include "privsim/metrics/summary.h"

#include <algorithm>
#include <cmath>
#include <vector>

namespace privsim::metrics {

double HistogramEntropy(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += std::max(w, 0.0);
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double w : weights) {
    if (w <= 0.0) continue;
    const double p = w / total;
    h -= p * std::log(p);
  }
  return h;
}

size_t UniqueSampleCount(std::span<const Sample> samples) {
  std::vector<const std::vector<uint8_t>*> buffers;
  buffers.reserve(samples.size());
  for (const Sample& s : samples) buffers.push_back(&s.image.pixels);
  std::sort(buffers.begin(), buffers.end(),
            [](const auto* a, const auto* b) { return *a < *b; });
  const auto last =
      std::unique(buffers.begin(), buffers.end(),
                  [](const auto* a, const auto* b) { return *a == *b; });
  return static_cast<size_t>(last - buffers.begin());
}

}  // namespace privsim::metrics
