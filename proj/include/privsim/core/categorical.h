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

#ifndef PRIVSIM_CORE_CATEGORICAL_H_
#define PRIVSIM_CORE_CATEGORICAL_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "privsim/core/rng.h"

namespace privsim {

// Inverse-CDF sampler over non-negative weights. One Uniform01 per draw;
// zero-weight entries are never returned.
class CategoricalSampler {
 public:
  static absl::StatusOr<CategoricalSampler> Create(
      std::span<const double> weights);

  size_t Draw(RngStream& rng) const;
  size_t size() const { return cumulative_.size(); }

 private:
  explicit CategoricalSampler(std::vector<double> cumulative)
      : cumulative_(std::move(cumulative)) {}

  std::vector<double> cumulative_;
};

}  // namespace privsim

#endif  // PRIVSIM_CORE_CATEGORICAL_H_
