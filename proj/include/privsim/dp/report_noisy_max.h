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

#ifndef PRIVSIM_DP_REPORT_NOISY_MAX_H_
#define PRIVSIM_DP_REPORT_NOISY_MAX_H_

#include <span>

#include "absl/status/statusor.h"
#include "privsim/core/rng.h"

namespace privsim::dp {

// argmax_i scores[i] + Laplace(2 * sensitivity / epsilon); lowest index wins
// ties.
absl::StatusOr<size_t> ReportNoisyMax(std::span<const double> scores,
                                      double sensitivity, double epsilon,
                                      RngStream& rng);

}  // namespace privsim::dp

#endif  // PRIVSIM_DP_REPORT_NOISY_MAX_H_
