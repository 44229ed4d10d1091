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

// Self-contained stand-ins for private datasets: renders from a restricted
// parameter region, and a two-blob toy whose 16x16 images embed to their own
// pixels.

#ifndef PRIVSIM_CLI_FIXTURES_H_
#define PRIVSIM_CLI_FIXTURES_H_

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "privsim/core/param_space.h"
#include "privsim/core/rng.h"
#include "privsim/core/sample.h"
#include "privsim/simulators/parametric_backend.h"

namespace privsim::cli {

// Restrictions on RANDOM_API draws. Listed categoricals are drawn uniformly
// from the given values, listed numericals uniformly from [lo, hi] (grid
// points only for discrete parameters). Everything else is unrestricted.
struct ParamRegion {
  std::map<std::string, std::vector<int>> categorical;
  std::map<std::string, std::pair<double, double>> numerical;

  absl::Status Validate(const ParamSpace& space) const;
};

absl::StatusOr<ParamVector> DrawRegionParams(const ParamSpace& space,
                                             const ParamRegion& region,
                                             RngStream& rng);

// n renders from the region. With label_param, each sample is labeled by the
// value of that categorical parameter.
absl::StatusOr<std::vector<Sample>> GenerateRegionSamples(
    const simulators::ParametricBackend& backend, const ParamRegion& region,
    size_t n, const std::optional<std::string>& label_param, RngStream& rng,
    int threads = 1);

// Fonts {6, 7}, size [18, 24], stroke {1, 2}, rotation [-15, 15].
ParamRegion TextFixtureRegion();

struct TwoBlobOptions {
  int side = 16;
  int num_classes = 10;
  double blob_level[2] = {64.0, 192.0};
  double class_amplitude = 30.0;
  double noise_sd = 12.0;
  uint64_t pattern_seed = 0x5eed;
};

// n grayscale side x side images from blob 0 or 1. Item i belongs to class
// i % num_classes: pixel = level + amplitude * sign_c(pixel) + noise, with
// per-class sign patterns fixed by pattern_seed.
absl::StatusOr<std::vector<Sample>> GenerateBlobSamples(
    const TwoBlobOptions& options, int blob, size_t n, RngStream& rng);

}  // namespace privsim::cli

#endif  // PRIVSIM_CLI_FIXTURES_H_
