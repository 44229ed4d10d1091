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

#ifndef PRIVSIM_CORE_SCHEDULE_H_
#define PRIVSIM_CORE_SCHEDULE_H_

#include <map>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "privsim/core/param_space.h"

namespace privsim {

// Variation degrees and backend plan for a run of `iterations` (T) refinement
// steps. Iteration t in [1, T] reads entry t - 1 of every per-iteration list;
// backend_ids has T + 1 entries, entry 0 serving the initial random draw.
//
// alpha is keyed by numerical parameter name, beta by categorical parameter
// name. Parameters absent from the maps get degree 0 (no variation).
struct IterationSchedule {
  int iterations = 0;
  std::vector<std::string> backend_ids;
  std::map<std::string, std::vector<double>> alpha;
  std::map<std::string, std::vector<double>> beta;
  std::vector<int> gamma;

  // Shape and range checks. Backend ids are resolved by the engine.
  absl::Status Validate() const;

  // Degrees for iteration t (1-based), aligned with the space's parameter
  // order.
  std::vector<double> AlphaAt(const ParamSpace& space, int t) const;
  std::vector<double> BetaAt(const ParamSpace& space, int t) const;
  // 1 when no gamma schedule is given.
  int GammaAt(int t) const;
  int MaxGamma() const;

  enum class Clamp { kSmallest, kLargest };
  // Every per-iteration list replaced by its min (kSmallest) or max
  // (kLargest) across iterations.
  IterationSchedule Clamped(Clamp mode) const;
};

}  // namespace privsim

#endif  // PRIVSIM_CORE_SCHEDULE_H_
