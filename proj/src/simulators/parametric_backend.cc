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

#include "privsim/simulators/parametric_backend.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privsim/core/parallel.h"
#include "privsim/core/status_macros.h"

namespace privsim::simulators {

absl::StatusOr<ParametricBackend> ParametricBackend::Create(
    std::string id, ParamSpace space, ImageShape shape, RenderFn render,
    std::optional<std::string> class_param, std::optional<int> num_classes) {
  if (!render) {
    return absl::InvalidArgumentError("backend needs a render function");
  }
  if (shape.num_values() == 0) {
    return absl::InvalidArgumentError("backend image shape is empty");
  }
  ParametricBackend backend;
  if (class_param.has_value()) {
    const auto index = space.CategoricalIndex(*class_param);
    if (!index.has_value()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "class parameter '", *class_param, "' is not categorical"));
    }
    const int k = space.categorical()[*index].cardinality;
    if (num_classes.has_value() && *num_classes != k) {
      return absl::InvalidArgumentError(
          absl::StrCat("class parameter '", *class_param, "' has ", k,
                       " values but the run has ", *num_classes, " classes"));
    }
    backend.class_index_ = *index;
  }
  backend.id_ = std::move(id);
  backend.space_ = std::move(space);
  backend.shape_ = shape;
  backend.render_ = std::move(render);
  return backend;
}

absl::StatusOr<Image> ParametricBackend::Render(
    const ParamVector& params) const {
  RETURN_IF_ERROR(space_.Validate(params));
  ASSIGN_OR_RETURN(Image image, render_(params));
  if (image.shape != shape_ || image.pixels.size() != shape_.num_values()) {
    return absl::InternalError(
        absl::StrCat("backend '", id_, "' rendered a wrongly shaped image"));
  }
  return image;
}

ParamVector DrawRandomParams(const ParamSpace& space, RngStream& rng,
                             std::optional<std::pair<int, int>> fixed) {
  ParamVector out;
  out.categorical.resize(space.categorical().size());
  out.numerical.resize(space.numerical().size());
  for (size_t i = 0; i < space.categorical().size(); ++i) {
    if (fixed.has_value() && static_cast<size_t>(fixed->first) == i) {
      out.categorical[i] = fixed->second;
      continue;
    }
    out.categorical[i] = static_cast<int>(
        rng.UniformIndex(static_cast<uint64_t>(space.categorical()[i].cardinality)));
  }
  for (size_t i = 0; i < space.numerical().size(); ++i) {
    const NumericalParam& p = space.numerical()[i];
    if (p.discrete()) {
      const int grid = space.GridSize(static_cast<int>(i));
      out.numerical[i] =
          p.lo + static_cast<double>(rng.UniformIndex(grid)) * p.step;
    } else {
      out.numerical[i] = rng.Uniform(p.lo, p.hi);
    }
  }
  return out;
}

absl::StatusOr<ParamVector> VaryParams(const ParamSpace& space,
                                       const ParamVector& input,
                                       std::span<const double> alpha,
                                       std::span<const double> beta,
                                       RngStream& rng,
                                       std::optional<std::pair<int, int>> fixed) {
  RETURN_IF_ERROR(space.Validate(input));
  if (alpha.size() != space.numerical().size() ||
      beta.size() != space.categorical().size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "variation degrees have ", alpha.size(), "+", beta.size(),
        " entries, space expects ", space.numerical().size(), "+",
        space.categorical().size()));
  }
  for (double a : alpha) {
    if (!(a >= 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("alpha must be >= 0, got ", a));
    }
  }
  for (double b : beta) {
    if (!(b >= 0.0 && b <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("beta must be in [0, 1], got ", b));
    }
  }
  if (fixed.has_value() && input.categorical[fixed->first] != fixed->second) {
    return absl::InvalidArgumentError(absl::StrCat(
        "input has class value ", input.categorical[fixed->first],
        ", expected ", fixed->second));
  }

  ParamVector out = input;
  for (size_t i = 0; i < space.categorical().size(); ++i) {
    if (fixed.has_value() && static_cast<size_t>(fixed->first) == i) continue;
    if (rng.Bernoulli(beta[i])) {
      out.categorical[i] = static_cast<int>(rng.UniformIndex(
          static_cast<uint64_t>(space.categorical()[i].cardinality)));
    }
  }
  for (size_t i = 0; i < space.numerical().size(); ++i) {
    if (alpha[i] == 0.0) continue;
    const NumericalParam& p = space.numerical()[i];
    const double lo = std::max(p.lo, input.numerical[i] - alpha[i]);
    const double hi = std::min(p.hi, input.numerical[i] + alpha[i]);
    if (p.discrete()) {
      // Grid points k with lo <= p.lo + k * step <= hi.
      const int first =
          static_cast<int>(std::ceil((lo - p.lo) / p.step - 1e-9));
      const int last =
          std::min(static_cast<int>(std::floor((hi - p.lo) / p.step + 1e-9)),
                   space.GridSize(static_cast<int>(i)) - 1);
      const int k = first + static_cast<int>(rng.UniformIndex(
                                static_cast<uint64_t>(last - first + 1)));
      out.numerical[i] = p.lo + k * p.step;
    } else {
      out.numerical[i] = rng.Uniform(lo, hi);
    }
  }
  return out;
}

absl::StatusOr<std::optional<std::pair<int, int>>> ClassPin(
    const ParametricBackend& backend, std::optional<int> class_id) {
  if (!class_id.has_value()) return std::optional<std::pair<int, int>>();
  if (!backend.class_param_index().has_value()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "backend '", backend.id(), "' has no class parameter"));
  }
  const int index = *backend.class_param_index();
  const int k = backend.space().categorical()[index].cardinality;
  if (*class_id < 0 || *class_id >= k) {
    return absl::InvalidArgumentError(
        absl::StrCat("class ", *class_id, " outside {0..", k - 1, "}"));
  }
  return std::optional<std::pair<int, int>>(std::make_pair(index, *class_id));
}

absl::StatusOr<std::vector<Sample>> RandomApi(const ParametricBackend& backend,
                                              int n,
                                              std::optional<int> class_id,
                                              RngStream& rng, int threads) {
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("random draw count must be >= 1, got ", n));
  }
  ASSIGN_OR_RETURN(const auto pin, ClassPin(backend, class_id));
  std::vector<Sample> out(static_cast<size_t>(n));
  for (Sample& s : out) {
    s.provenance = DrawRandomParams(backend.space(), rng, pin);
    s.label = class_id;
  }
  std::vector<absl::Status> errors(out.size());
  ParallelFor(out.size(), threads, [&](size_t i) {
    auto image = backend.Render(std::get<ParamVector>(out[i].provenance));
    if (image.ok()) {
      out[i].image = *std::move(image);
    } else {
      errors[i] = image.status();
    }
  });
  for (const absl::Status& e : errors) RETURN_IF_ERROR(e);
  return out;
}

absl::StatusOr<Sample> VariationApi(const ParametricBackend& backend,
                                    const ParamVector& input,
                                    std::span<const double> alpha,
                                    std::span<const double> beta,
                                    std::optional<int> class_id,
                                    RngStream& rng) {
  ASSIGN_OR_RETURN(const auto pin, ClassPin(backend, class_id));
  ASSIGN_OR_RETURN(ParamVector params,
                   VaryParams(backend.space(), input, alpha, beta, rng, pin));
  Sample out;
  ASSIGN_OR_RETURN(out.image, backend.Render(params));
  out.label = class_id;
  out.provenance = std::move(params);
  return out;
}

}  // namespace privsim::simulators
