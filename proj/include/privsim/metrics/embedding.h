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

#ifndef PRIVSIM_METRICS_EMBEDDING_H_
#define PRIVSIM_METRICS_EMBEDDING_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "privsim/core/embedding_matrix.h"
#include "privsim/core/sample.h"

namespace privsim::metrics {

// Fixed pixel-space embedding: luma grayscale (0.299, 0.587, 0.114 for RGB),
// bilinear resample to 16x16, scaled to [0, 1], flattened row-major.
class PixelEmbedder {
 public:
  static constexpr int kSide = 16;
  static constexpr int kDim = kSide * kSide;
  // Bumped whenever the embedding changes; part of neighbor-cache keys.
  static constexpr int kVersion = 1;

  explicit PixelEmbedder(ImageShape shape) : shape_(shape) {}

  ImageShape shape() const { return shape_; }

  absl::StatusOr<std::vector<double>> Embed(const Image& image) const;

  absl::StatusOr<EmbeddingMatrix> EmbedAll(std::span<const Image> images,
                                           int threads = 1) const;
  absl::StatusOr<EmbeddingMatrix> EmbedAll(std::span<const Sample> samples,
                                           int threads = 1) const;

 private:
  ImageShape shape_;
};

}  // namespace privsim::metrics

#endif  // PRIVSIM_METRICS_EMBEDDING_H_
