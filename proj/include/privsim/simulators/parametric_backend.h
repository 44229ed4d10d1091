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

// Generation backends with code access: a parameter space plus a pure render
// function.
//
// RANDOM_API draws every parameter uniformly from its feasible set.
// VARIATION_API perturbs a parameter vector:
//   numerical   phi' ~ Uniform([phi - alpha, phi + alpha] intersect Phi)
//   categorical xi'  = Uniform(Xi) with probability beta, else xi
// For a discrete numerical parameter, Phi is its grid, so the intersection is
// the set of grid points within alpha of phi.

#ifndef PRIVSIM_SIMULATORS_PARAMETRIC_BACKEND_H_
#define PRIVSIM_SIMULATORS_PARAMETRIC_BACKEND_H_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privsim/core/param_space.h"
#include "privsim/core/rng.h"
#include "privsim/core/sample.h"

namespace privsim::simulators {

using RenderFn = std::function<absl::StatusOr<Image>(const ParamVector&)>;

class ParametricBackend {
 public:
  // `class_param`, when set, names the categorical parameter that fixes the
  // class label; its cardinality must equal `num_classes`.
  static absl::StatusOr<ParametricBackend> Create(
      std::string id, ParamSpace space, ImageShape shape, RenderFn render,
      std::optional<std::string> class_param = std::nullopt,
      std::optional<int> num_classes = std::nullopt);

  const std::string& id() const { return id_; }
  const ParamSpace& space() const { return space_; }
  ImageShape shape() const { return shape_; }
  std::optional<int> class_param_index() const { return class_index_; }

  absl::StatusOr<Image> Render(const ParamVector& params) const;

 private:
  std::string id_;
  ParamSpace space_;
  ImageShape shape_;
  RenderFn render_;
  std::optional<int> class_index_;
};

// Parameter-level RANDOM_API. `fixed_category` pins one categorical
// parameter (index, value) instead of sampling it.
ParamVector DrawRandomParams(
    const ParamSpace& space, RngStream& rng,
    std::optional<std::pair<int, int>> fixed_category = std::nullopt);

// Parameter-level VARIATION_API. The pinned categorical parameter, if any, is
// never resampled and must already hold the pinned value.
absl::StatusOr<ParamVector> VaryParams(
    const ParamSpace& space, const ParamVector& input,
    std::span<const double> alpha, std::span<const double> beta,
    RngStream& rng,
    std::optional<std::pair<int, int>> fixed_category = std::nullopt);

// n rendered samples with SimulatorParams provenance. With `class_id` the
// class parameter is pinned and every sample is labeled with it. Parameters
// are drawn sequentially from `rng`; rendering runs on `threads` workers.
absl::StatusOr<std::vector<Sample>> RandomApi(const ParametricBackend& backend,
                                              int n,
                                              std::optional<int> class_id,
                                              RngStream& rng, int threads = 1);

absl::StatusOr<Sample> VariationApi(const ParametricBackend& backend,
                                    const ParamVector& input,
                                    std::span<const double> alpha,
                                    std::span<const double> beta,
                                    std::optional<int> class_id,
                                    RngStream& rng);

// Resolves the (index, value) pin for a class id, or an error when the
// backend has no class parameter or the id is out of range.
absl::StatusOr<std::optional<std::pair<int, int>>> ClassPin(
    const ParametricBackend& backend, std::optional<int> class_id);

}  // namespace privsim::simulators

#endif  // PRIVSIM_SIMULATORS_PARAMETRIC_BACKEND_H_
