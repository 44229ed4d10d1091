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

#include "privsim/metrics/embedding.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privsim/core/parallel.h"

namespace privsim::metrics {

absl::StatusOr<std::vector<double>> PixelEmbedder::Embed(
    const Image& image) const {
  if (image.shape != shape_ || image.pixels.size() != shape_.num_values()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "image is ", image.shape.height, "x", image.shape.width, "x",
        image.shape.channels, ", embedder expects ", shape_.height, "x",
        shape_.width, "x", shape_.channels));
  }
  const int h = shape_.height, w = shape_.width, c = shape_.channels;
  if (c != 1 && c != 3) {
    return absl::InvalidArgumentError(
        absl::StrCat("unsupported channel count ", c));
  }
  std::vector<double> gray(static_cast<size_t>(h) * w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double v;
      if (c == 1) {
        v = image.at(y, x);
      } else {
        v = 0.299 * image.at(y, x, 0) + 0.587 * image.at(y, x, 1) +
            0.114 * image.at(y, x, 2);
      }
      gray[y * w + x] = v / 255.0;
    }
  }
  auto px = [&](int y, int x) {
    return gray[std::clamp(y, 0, h - 1) * w + std::clamp(x, 0, w - 1)];
  };
  std::vector<double> out(kDim);
  const double sy = static_cast<double>(h) / kSide;
  const double sx = static_cast<double>(w) / kSide;
  for (int i = 0; i < kSide; ++i) {
    const double fy = std::clamp((i + 0.5) * sy - 0.5, 0.0, h - 1.0);
    const int y0 = static_cast<int>(std::floor(fy));
    const double ay = fy - y0;
    for (int j = 0; j < kSide; ++j) {
      const double fx = std::clamp((j + 0.5) * sx - 0.5, 0.0, w - 1.0);
      const int x0 = static_cast<int>(std::floor(fx));
      const double ax = fx - x0;
      out[i * kSide + j] =
          (1 - ay) * ((1 - ax) * px(y0, x0) + ax * px(y0, x0 + 1)) +
          ay * ((1 - ax) * px(y0 + 1, x0) + ax * px(y0 + 1, x0 + 1));
    }
  }
  return out;
}

absl::StatusOr<EmbeddingMatrix> PixelEmbedder::EmbedAll(
    std::span<const Image> images, int threads) const {
  EmbeddingMatrix out(images.size(), kDim);
  std::vector<absl::Status> errors(images.size());
  ParallelFor(images.size(), threads, [&](size_t i) {
    auto e = Embed(images[i]);
    if (!e.ok()) {
      errors[i] = e.status();
      return;
    }
    std::copy(e->begin(), e->end(), out.row(i).begin());
  });
  for (const absl::Status& s : errors) {
    if (!s.ok()) return s;
  }
  return out;
}

absl::StatusOr<EmbeddingMatrix> PixelEmbedder::EmbedAll(
    std::span<const Sample> samples, int threads) const {
  EmbeddingMatrix out(samples.size(), kDim);
  std::vector<absl::Status> errors(samples.size());
  ParallelFor(samples.size(), threads, [&](size_t i) {
    auto e = Embed(samples[i].image);
    if (!e.ok()) {
      errors[i] = e.status();
      return;
    }
    std::copy(e->begin(), e->end(), out.row(i).begin());
  });
  for (const absl::Status& s : errors) {
    if (!s.ok()) return s;
  }
  return out;
}

}  // namespace privsim::metrics
