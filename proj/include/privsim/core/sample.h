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

#ifndef PRIVSIM_CORE_SAMPLE_H_
#define PRIVSIM_CORE_SAMPLE_H_

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "privsim/core/param_space.h"

namespace privsim {

struct ImageShape {
  int height = 0;
  int width = 0;
  int channels = 0;

  size_t num_values() const {
    return static_cast<size_t>(height) * width * channels;
  }
  friend bool operator==(const ImageShape&, const ImageShape&) = default;
};

// Row-major H x W x C array of 8-bit intensities.
struct Image {
  ImageShape shape;
  std::vector<uint8_t> pixels;

  Image() = default;
  explicit Image(ImageShape s) : shape(s), pixels(s.num_values(), 0) {}

  uint8_t& at(int y, int x, int c = 0) {
    return pixels[(static_cast<size_t>(y) * shape.width + x) * shape.channels +
                  c];
  }
  uint8_t at(int y, int x, int c = 0) const {
    return pixels[(static_cast<size_t>(y) * shape.width + x) * shape.channels +
                  c];
  }

  friend bool operator==(const Image&, const Image&) = default;
};

struct DatasetIndex {
  int64_t value = 0;
  friend bool operator==(const DatasetIndex&, const DatasetIndex&) = default;
};

// Where a sample came from: simulator parameters, a corpus row, or nothing
// (e.g. private data).
using Provenance = std::variant<std::monostate, ParamVector, DatasetIndex>;

struct Sample {
  Image image;
  std::optional<int> label;
  Provenance provenance;
};

}  // namespace privsim

#endif  // PRIVSIM_CORE_SAMPLE_H_
