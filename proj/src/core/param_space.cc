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

#include "privsim/core/param_space.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "absl/strings/str_cat.h"

namespace privsim {

absl::StatusOr<ParamSpace> ParamSpace::Create(
    std::vector<CategoricalParam> categorical,
    std::vector<NumericalParam> numerical) {
  std::set<std::string> names;
  for (const CategoricalParam& p : categorical) {
    if (p.cardinality < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("categorical '", p.name, "' has cardinality ",
                       p.cardinality, " (< 1)"));
    }
    if (!names.insert(p.name).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate parameter name '", p.name, "'"));
    }
  }
  for (const NumericalParam& p : numerical) {
    if (!std::isfinite(p.lo) || !std::isfinite(p.hi) || !(p.lo <= p.hi)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "numerical '", p.name, "' has invalid range [", p.lo, ", ", p.hi,
          "]"));
    }
    if (!(p.step >= 0.0) || !std::isfinite(p.step)) {
      return absl::InvalidArgumentError(
          absl::StrCat("numerical '", p.name, "' has invalid step ", p.step));
    }
    if (!names.insert(p.name).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate parameter name '", p.name, "'"));
    }
  }
  ParamSpace space;
  space.categorical_ = std::move(categorical);
  space.numerical_ = std::move(numerical);
  return space;
}

std::optional<int> ParamSpace::CategoricalIndex(std::string_view name) const {
  for (size_t i = 0; i < categorical_.size(); ++i) {
    if (categorical_[i].name == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::optional<int> ParamSpace::NumericalIndex(std::string_view name) const {
  for (size_t i = 0; i < numerical_.size(); ++i) {
    if (numerical_[i].name == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

int ParamSpace::GridSize(int numerical_index) const {
  const NumericalParam& p = numerical_[numerical_index];
  if (!p.discrete()) return 0;
  return static_cast<int>(std::floor((p.hi - p.lo) / p.step + 1e-9)) + 1;
}

double ParamSpace::Snap(int numerical_index, double value) const {
  const NumericalParam& p = numerical_[numerical_index];
  value = std::clamp(value, p.lo, p.hi);
  if (!p.discrete()) return value;
  const int last = GridSize(numerical_index) - 1;
  const int k = std::clamp(
      static_cast<int>(std::lround((value - p.lo) / p.step)), 0, last);
  return p.lo + k * p.step;
}

absl::Status ParamSpace::Validate(const ParamVector& params) const {
  if (params.categorical.size() != categorical_.size() ||
      params.numerical.size() != numerical_.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "parameter vector has ", params.categorical.size(), "+",
        params.numerical.size(), " entries, space expects ",
        categorical_.size(), "+", numerical_.size()));
  }
  for (size_t i = 0; i < categorical_.size(); ++i) {
    const int v = params.categorical[i];
    if (v < 0 || v >= categorical_[i].cardinality) {
      return absl::InvalidArgumentError(
          absl::StrCat("'", categorical_[i].name, "' = ", v,
                       " outside {0..", categorical_[i].cardinality - 1, "}"));
    }
  }
  for (size_t i = 0; i < numerical_.size(); ++i) {
    const NumericalParam& p = numerical_[i];
    const double v = params.numerical[i];
    if (!std::isfinite(v) || v < p.lo || v > p.hi) {
      return absl::InvalidArgumentError(absl::StrCat(
          "'", p.name, "' = ", v, " outside [", p.lo, ", ", p.hi, "]"));
    }
    if (p.discrete()) {
      const double k = (v - p.lo) / p.step;
      if (std::fabs(k - std::round(k)) > 1e-9) {
        return absl::InvalidArgumentError(absl::StrCat(
            "'", p.name, "' = ", v, " is not on its grid (step ", p.step,
            ")"));
      }
    }
  }
  return absl::OkStatus();
}

bool operator==(const CategoricalParam& a, const CategoricalParam& b) {
  return a.name == b.name && a.cardinality == b.cardinality;
}

bool operator==(const NumericalParam& a, const NumericalParam& b) {
  return a.name == b.name && a.lo == b.lo && a.hi == b.hi && a.step == b.step;
}

bool operator==(const ParamSpace& a, const ParamSpace& b) {
  return a.categorical_ == b.categorical_ && a.numerical_ == b.numerical_;
}

}  // namespace privsim
