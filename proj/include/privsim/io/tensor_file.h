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

// Tensor file layout (all integers little-endian):
//
//   offset  size  field
//   0       4     magic "SPE1"
//   4       1     dtype (0 = u8, 1 = f32)
//   5       16    n, H, W, C as u32
//   21      1     label flag (0 or 1)
//   22      ...   n*H*W*C values, row-major
//   ...     2n    u16 labels, when the flag is set
//
// A text sidecar "<path>.meta" records shape, dtype and a content hash.

#ifndef PRIVSIM_IO_TENSOR_FILE_H_
#define PRIVSIM_IO_TENSOR_FILE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privsim/core/sample.h"

namespace privsim::io {

inline constexpr char kTensorMagic[4] = {'S', 'P', 'E', '1'};
inline constexpr size_t kTensorHeaderSize = 22;

enum class DType : uint8_t { kU8 = 0, kF32 = 1 };

struct TensorData {
  DType dtype = DType::kU8;
  uint32_t n = 0, height = 0, width = 0, channels = 0;
  std::vector<uint8_t> u8;   // used when dtype == kU8
  std::vector<float> f32;    // used when dtype == kF32
  std::optional<std::vector<uint16_t>> labels;

  size_t num_values() const {
    return static_cast<size_t>(n) * height * width * channels;
  }
  size_t ByteSize() const;
  friend bool operator==(const TensorData&, const TensorData&) = default;
};

absl::StatusOr<std::string> EncodeTensor(const TensorData& data);
absl::StatusOr<TensorData> DecodeTensor(std::string_view bytes);

// Writes the file and its ".meta" sidecar. `source` is a free-form line
// recorded in the sidecar.
absl::Status WriteTensorFile(const std::string& path, const TensorData& data,
                             const std::string& source = "");
absl::StatusOr<TensorData> ReadTensorFile(const std::string& path);

// u8 tensor from samples sharing one shape; labels are written when every
// sample has one.
absl::StatusOr<TensorData> TensorFromSamples(std::span<const Sample> samples);
// Samples with DatasetIndex provenance equal to their position.
absl::StatusOr<std::vector<Sample>> SamplesFromTensor(const TensorData& data);

absl::StatusOr<std::string> ReadFileBytes(const std::string& path);
absl::Status WriteFileBytes(const std::string& path, std::string_view bytes);
// FNV-1a of the file contents, as hex.
absl::StatusOr<std::string> FileDigest(const std::string& path);

}  // namespace privsim::io

#endif  // PRIVSIM_IO_TENSOR_FILE_H_
