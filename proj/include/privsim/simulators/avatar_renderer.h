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

// Rule-based cartoon avatar compositor: 32x32 RGB from 16 categorical
// parameters. Layers, back to front: background, long hair, clothing and
// shirt graphic, neck, face, facial hair, mouth, nose, eyes, eyebrows,
// hair/hat, accessory.

#ifndef PRIVSIM_SIMULATORS_AVATAR_RENDERER_H_
#define PRIVSIM_SIMULATORS_AVATAR_RENDERER_H_

#include <vector>

#include "absl/status/statusor.h"
#include "privsim/core/param_space.h"
#include "privsim/core/sample.h"
#include "privsim/simulators/parametric_backend.h"

namespace privsim::simulators {

inline constexpr int kAvatarCanvas = 32;

// Categorical parameter indices, in ParamSpace order.
enum AvatarParam : int {
  kAvatarStyle = 0,
  kAvatarBackgroundColor,
  kAvatarTop,
  kAvatarHatColor,
  kAvatarEyebrows,
  kAvatarEyes,
  kAvatarNose,
  kAvatarMouth,
  kAvatarFacialHair,
  kAvatarSkinColor,
  kAvatarHairColor,
  kAvatarFacialHairColor,
  kAvatarAccessory,
  kAvatarClothing,
  kAvatarClothingColor,
  kAvatarShirtGraphic,
  kAvatarNumParams,
};

ParamSpace AvatarParamSpace();

absl::StatusOr<Image> RenderAvatar(const ParamVector& params);

// Pixels covered by the face ellipse (row-major, 1 = face). Independent of
// the parameters.
std::vector<uint8_t> AvatarFaceMask();

ParametricBackend MakeAvatarBackend();

}  // namespace privsim::simulators

#endif  // PRIVSIM_SIMULATORS_AVATAR_RENDERER_H_
