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

#ifndef PRIVSIM_CORE_PARAM_SPACE_H_
#define PRIVSIM_CORE_PARAM_SPACE_H_

#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace privsim {

// A categorical parameter takes values in {0, ..., cardinality - 1}.
struct CategoricalParam {
  std::string name;
  int cardinality = 1;
};

// A numerical parameter takes values in [lo, hi]. With step > 0 the feasible
// set is the grid {lo, lo + step, ...} clipped to [lo, hi].
struct NumericalParam {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;

  bool discrete() const { return step > 0.0; }
};

struct ParamVector {
  std::vector<int> categorical;
  std::vector<double> numerical;

  friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

// The feasible sets of a simulator's parameters. Immutable once created.
class ParamSpace {
 public:
  static absl::StatusOr<ParamSpace> Create(
      std::vector<CategoricalParam> categorical,
      std::vector<NumericalParam> numerical);

  ParamSpace() = default;

  const std::vector<CategoricalParam>& categorical() const {
    return categorical_;
  }
  const std::vector<NumericalParam>& numerical() const { return numerical_; }

  std::optional<int> CategoricalIndex(std::string_view name) const;
  std::optional<int> NumericalIndex(std::string_view name) const;

  // Nearest grid point of a discrete parameter, kept inside [lo, hi].
  // Continuous parameters are only clamped.
  double Snap(int numerical_index, double value) const;

  // Number of grid points of a discrete parameter.
  int GridSize(int numerical_index) const;

  absl::Status Validate(const ParamVector& params) const;

  friend bool operator==(const ParamSpace&, const ParamSpace&);

 private:
  std::vector<CategoricalParam> categorical_;
  std::vector<NumericalParam> numerical_;
};

bool operator==(const CategoricalParam& a, const CategoricalParam& b);
bool operator==(const NumericalParam& a, const NumericalParam& b);

}  // namespace privsim

#endif  // PRIVSIM_CORE_PARAM_SPACE_H_
