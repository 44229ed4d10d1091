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

#include "privsim/core/schedule.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace privsim {
namespace {

template <typename T>
void ClampList(std::vector<T>& values, IterationSchedule::Clamp mode) {
  if (values.empty()) return;
  const T v = mode == IterationSchedule::Clamp::kSmallest
                  ? *std::min_element(values.begin(), values.end())
                  : *std::max_element(values.begin(), values.end());
  std::fill(values.begin(), values.end(), v);
}

}  // namespace

absl::Status IterationSchedule::Validate() const {
  if (iterations < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("iteration count ", iterations, " is negative"));
  }
  const size_t t = static_cast<size_t>(iterations);
  if (backend_ids.size() != t + 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("backend plan has ", backend_ids.size(),
                     " entries, expected T + 1 = ", t + 1));
  }
  for (const auto& [name, values] : alpha) {
    if (values.size() != t) {
      return absl::InvalidArgumentError(absl::StrCat(
          "alpha schedule for '", name, "' has ", values.size(),
          " entries, expected ", t));
    }
    for (double a : values) {
      if (!(a >= 0.0) || std::isnan(a)) {
        return absl::InvalidArgumentError(
            absl::StrCat("alpha for '", name, "' must be >= 0, got ", a));
      }
    }
  }
  for (const auto& [name, values] : beta) {
    if (values.size() != t) {
      return absl::InvalidArgumentError(absl::StrCat(
          "beta schedule for '", name, "' has ", values.size(),
          " entries, expected ", t));
    }
    for (double b : values) {
      if (!(b >= 0.0 && b <= 1.0)) {
        return absl::InvalidArgumentError(
            absl::StrCat("beta for '", name, "' must be in [0,1], got ", b));
      }
    }
  }
  if (!gamma.empty()) {
    if (gamma.size() != t) {
      return absl::InvalidArgumentError(absl::StrCat(
          "gamma schedule has ", gamma.size(), " entries, expected ", t));
    }
    for (int g : gamma) {
      if (g < 1) {
        return absl::InvalidArgumentError(
            absl::StrCat("gamma must be >= 1, got ", g));
      }
    }
  }
  return absl::OkStatus();
}

std::vector<double> IterationSchedule::AlphaAt(const ParamSpace& space,
                                               int t) const {
  std::vector<double> out(space.numerical().size(), 0.0);
  for (size_t i = 0; i < out.size(); ++i) {
    auto it = alpha.find(space.numerical()[i].name);
    if (it != alpha.end()) out[i] = it->second[t - 1];
  }
  return out;
}

std::vector<double> IterationSchedule::BetaAt(const ParamSpace& space,
                                              int t) const {
  std::vector<double> out(space.categorical().size(), 0.0);
  for (size_t i = 0; i < out.size(); ++i) {
    auto it = beta.find(space.categorical()[i].name);
    if (it != beta.end()) out[i] = it->second[t - 1];
  }
  return out;
}

int IterationSchedule::GammaAt(int t) const {
  return gamma.empty() ? 1 : gamma[t - 1];
}

int IterationSchedule::MaxGamma() const {
  return gamma.empty() ? 1 : *std::max_element(gamma.begin(), gamma.end());
}

IterationSchedule IterationSchedule::Clamped(Clamp mode) const {
  IterationSchedule out = *this;
  for (auto& [name, values] : out.alpha) ClampList(values, mode);
  for (auto& [name, values] : out.beta) ClampList(values, mode);
  ClampList(out.gamma, mode);
  return out;
}

}  // namespace privsim
