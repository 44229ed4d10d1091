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

#include "privsim/cli/fixtures.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privsim/core/parallel.h"
#include "privsim/core/status_macros.h"

namespace privsim::cli {

absl::Status ParamRegion::Validate(const ParamSpace& space) const {
  for (const auto& [name, values] : categorical) {
    auto idx = space.CategoricalIndex(name);
    if (!idx.has_value()) {
      return absl::InvalidArgumentError(
          absl::StrCat("region names unknown categorical '", name, "'"));
    }
    if (values.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("region for '", name, "' is empty"));
    }
    for (int v : values) {
      if (v < 0 || v >= space.categorical()[*idx].cardinality) {
        return absl::InvalidArgumentError(
            absl::StrCat("region value ", v, " out of range for '", name, "'"));
      }
    }
  }
  for (const auto& [name, range] : numerical) {
    auto idx = space.NumericalIndex(name);
    if (!idx.has_value()) {
      return absl::InvalidArgumentError(
          absl::StrCat("region names unknown numerical '", name, "'"));
    }
    const NumericalParam& p = space.numerical()[*idx];
    if (!(range.first <= range.second) || range.first < p.lo ||
        range.second > p.hi) {
      return absl::InvalidArgumentError(absl::StrCat(
          "region [", range.first, ", ", range.second, "] for '", name,
          "' is not inside [", p.lo, ", ", p.hi, "]"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<ParamVector> DrawRegionParams(const ParamSpace& space,
                                             const ParamRegion& region,
                                             RngStream& rng) {
  ParamVector out;
  for (const CategoricalParam& p : space.categorical()) {
    auto it = region.categorical.find(p.name);
    if (it == region.categorical.end()) {
      out.categorical.push_back(
          static_cast<int>(rng.UniformIndex(p.cardinality)));
    } else {
      out.categorical.push_back(it->second[rng.UniformIndex(it->second.size())]);
    }
  }
  for (const NumericalParam& p : space.numerical()) {
    auto it = region.numerical.find(p.name);
    const double lo = it == region.numerical.end() ? p.lo : it->second.first;
    const double hi = it == region.numerical.end() ? p.hi : it->second.second;
    if (!p.discrete()) {
      out.numerical.push_back(rng.Uniform(lo, hi));
      continue;
    }
    const auto first = static_cast<int64_t>(std::ceil((lo - p.lo) / p.step - 1e-9));
    const auto last = static_cast<int64_t>(std::floor((hi - p.lo) / p.step + 1e-9));
    if (last < first) {
      return absl::InvalidArgumentError(
          absl::StrCat("region for '", p.name, "' holds no grid point"));
    }
    const auto k = first + static_cast<int64_t>(rng.UniformIndex(
                               static_cast<uint64_t>(last - first + 1)));
    out.numerical.push_back(p.lo + static_cast<double>(k) * p.step);
  }
  return out;
}

absl::StatusOr<std::vector<Sample>> GenerateRegionSamples(
    const simulators::ParametricBackend& backend, const ParamRegion& region,
    size_t n, const std::optional<std::string>& label_param, RngStream& rng,
    int threads) {
  const ParamSpace& space = backend.space();
  RETURN_IF_ERROR(region.Validate(space));
  std::optional<int> label_index;
  if (label_param.has_value()) {
    label_index = space.CategoricalIndex(*label_param);
    if (!label_index.has_value()) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown label parameter '", *label_param, "'"));
    }
  }
  std::vector<Sample> out(n);
  for (Sample& s : out) {
    ASSIGN_OR_RETURN(ParamVector params, DrawRegionParams(space, region, rng));
    if (label_index.has_value()) s.label = params.categorical[*label_index];
    s.provenance = std::move(params);
  }
  std::vector<absl::Status> errors(n);
  ParallelFor(n, threads, [&](size_t i) {
    auto image = backend.Render(std::get<ParamVector>(out[i].provenance));
    if (image.ok()) {
      out[i].image = *std::move(image);
    } else {
      errors[i] = image.status();
    }
  });
  for (const absl::Status& s : errors) RETURN_IF_ERROR(s);
  return out;
}

ParamRegion TextFixtureRegion() {
  ParamRegion region;
  region.categorical["font"] = {6, 7};
  region.numerical["size"] = {18.0, 24.0};
  region.numerical["stroke"] = {1.0, 2.0};
  region.numerical["rotation"] = {-15.0, 15.0};
  return region;
}

absl::StatusOr<std::vector<Sample>> GenerateBlobSamples(
    const TwoBlobOptions& options, int blob, size_t n, RngStream& rng) {
  if (blob != 0 && blob != 1) {
    return absl::InvalidArgumentError("blob must be 0 or 1");
  }
  if (options.side < 1 || options.num_classes < 1) {
    return absl::InvalidArgumentError("invalid blob options");
  }
  const ImageShape shape{options.side, options.side, 1};
  const size_t pixels = shape.num_values();
  RngStream pattern_rng(options.pattern_seed);
  std::vector<std::vector<double>> sign(options.num_classes,
                                        std::vector<double>(pixels));
  for (auto& pattern : sign) {
    for (double& s : pattern) s = pattern_rng.Bernoulli(0.5) ? 1.0 : -1.0;
  }
  std::vector<Sample> out(n);
  for (size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % options.num_classes);
    Sample& s = out[i];
    s.image = Image(shape);
    for (size_t k = 0; k < pixels; ++k) {
      const double v = options.blob_level[blob] +
                       options.class_amplitude * sign[c][k] +
                       options.noise_sd * rng.Normal();
      s.image.pixels[k] =
          static_cast<uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
    s.label = c;
  }
  return out;
}

}  // namespace privsim::cli
