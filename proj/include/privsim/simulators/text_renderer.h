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

// Digit renderer: 28x28 grayscale images of a single digit.
//
// Parameters (in ParamSpace order):
//   categorical  font      {0..7}
//                text      {0..9}     (class parameter)
//   numerical    size      [10, 30], step 1   glyph height in pixels
//                stroke    [0, 2],   step 1   dilation passes
//                rotation  [-30, 30]          degrees, counter-clockwise

#ifndef PRIVSIM_SIMULATORS_TEXT_RENDERER_H_
#define PRIVSIM_SIMULATORS_TEXT_RENDERER_H_

#include "absl/status/statusor.h"
#include "privsim/core/param_space.h"
#include "privsim/core/sample.h"
#include "privsim/simulators/parametric_backend.h"

namespace privsim::simulators {

inline constexpr int kTextCanvas = 28;

struct TextSpaceOptions {
  double size_lo = 10.0;
  double size_hi = 30.0;
};

ParamSpace TextParamSpace(const TextSpaceOptions& options = {});

absl::StatusOr<Image> RenderText(const ParamVector& params);

// Backend over TextParamSpace with "text" as the class parameter.
ParametricBackend MakeTextBackend(const TextSpaceOptions& options = {});

}  // namespace privsim::simulators

#endif  // PRIVSIM_SIMULATORS_TEXT_RENDERER_H_
