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

#include "privsim/dp/report_noisy_max.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace privsim::dp {

absl::StatusOr<size_t> ReportNoisyMax(std::span<const double> scores,
                                      double sensitivity, double epsilon,
                                      RngStream& rng) {
  if (scores.empty()) {
    return absl::InvalidArgumentError("report noisy max over no candidates");
  }
  if (!(sensitivity > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sensitivity must be > 0, got ", sensitivity));
  }
  if (!(epsilon > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be > 0, got ", epsilon));
  }
  const double scale = 2.0 * sensitivity / epsilon;
  size_t best = 0;
  double best_value = -HUGE_VAL;
  for (size_t i = 0; i < scores.size(); ++i) {
    const double v = scores[i] + rng.Laplace(scale);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  return best;
}

}  // namespace privsim::dp
