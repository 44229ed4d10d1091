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

#include "privsim/io/tensor_file.h"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privsim/core/hash.h"
#include "privsim/core/status_macros.h"

namespace privsim::io {
namespace {

void PutU32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint32_t GetU32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

absl::Status CheckPayload(const TensorData& data) {
  const size_t values = data.num_values();
  if (data.dtype == DType::kU8) {
    if (data.u8.size() != values || !data.f32.empty()) {
      return absl::InvalidArgumentError("u8 payload does not match shape");
    }
  } else if (data.dtype == DType::kF32) {
    if (data.f32.size() != values || !data.u8.empty()) {
      return absl::InvalidArgumentError("f32 payload does not match shape");
    }
  } else {
    return absl::InvalidArgumentError("unknown dtype");
  }
  if (data.labels.has_value() && data.labels->size() != data.n) {
    return absl::InvalidArgumentError("label count does not match n");
  }
  return absl::OkStatus();
}

}  // namespace

size_t TensorData::ByteSize() const {
  const size_t value_size = dtype == DType::kF32 ? 4 : 1;
  return kTensorHeaderSize + num_values() * value_size +
         (labels.has_value() ? 2 * static_cast<size_t>(n) : 0);
}

absl::StatusOr<std::string> EncodeTensor(const TensorData& data) {
  RETURN_IF_ERROR(CheckPayload(data));
  std::string out;
  out.reserve(data.ByteSize());
  out.append(kTensorMagic, 4);
  out.push_back(static_cast<char>(data.dtype));
  PutU32(out, data.n);
  PutU32(out, data.height);
  PutU32(out, data.width);
  PutU32(out, data.channels);
  out.push_back(data.labels.has_value() ? 1 : 0);
  if (data.dtype == DType::kU8) {
    out.append(reinterpret_cast<const char*>(data.u8.data()), data.u8.size());
  } else {
    for (float f : data.f32) PutU32(out, std::bit_cast<uint32_t>(f));
  }
  if (data.labels.has_value()) {
    for (uint16_t l : *data.labels) {
      out.push_back(static_cast<char>(l & 0xff));
      out.push_back(static_cast<char>(l >> 8));
    }
  }
  return out;
}

absl::StatusOr<TensorData> DecodeTensor(std::string_view bytes) {
  if (bytes.size() < kTensorHeaderSize) {
    return absl::DataLossError("tensor file shorter than its header");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (std::memcmp(p, kTensorMagic, 4) != 0) {
    return absl::DataLossError("bad tensor file magic");
  }
  TensorData data;
  if (p[4] > 1) {
    return absl::DataLossError(absl::StrCat("unknown dtype code ", p[4]));
  }
  data.dtype = static_cast<DType>(p[4]);
  data.n = GetU32(p + 5);
  data.height = GetU32(p + 9);
  data.width = GetU32(p + 13);
  data.channels = GetU32(p + 17);
  if (p[21] > 1) return absl::DataLossError("bad label flag");
  const bool has_labels = p[21] == 1;
  if (has_labels) data.labels.emplace();
  if (bytes.size() != data.ByteSize()) {
    return absl::DataLossError(absl::StrCat("tensor file has ", bytes.size(),
                                            " bytes, header implies ",
                                            data.ByteSize()));
  }
  const unsigned char* body = p + kTensorHeaderSize;
  const size_t values = data.num_values();
  if (data.dtype == DType::kU8) {
    data.u8.assign(body, body + values);
    body += values;
  } else {
    data.f32.resize(values);
    for (size_t i = 0; i < values; ++i, body += 4) {
      data.f32[i] = std::bit_cast<float>(GetU32(body));
    }
  }
  if (has_labels) {
    data.labels->resize(data.n);
    for (uint32_t i = 0; i < data.n; ++i, body += 2) {
      (*data.labels)[i] = static_cast<uint16_t>(body[0] | body[1] << 8);
    }
  }
  return data;
}

absl::StatusOr<std::string> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (in.bad()) return absl::DataLossError(absl::StrCat("error reading ", path));
  return bytes;
}

absl::Status WriteFileBytes(const std::string& path, std::string_view bytes) {
  std::error_code ec;
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("error writing ", path));
  return absl::OkStatus();
}

absl::StatusOr<std::string> FileDigest(const std::string& path) {
  ASSIGN_OR_RETURN(std::string bytes, ReadFileBytes(path));
  Fnv1a64 h;
  h.Update(bytes);
  return HexDigest(h.digest());
}

absl::Status WriteTensorFile(const std::string& path, const TensorData& data,
                             const std::string& source) {
  ASSIGN_OR_RETURN(std::string bytes, EncodeTensor(data));
  RETURN_IF_ERROR(WriteFileBytes(path, bytes));
  Fnv1a64 h;
  h.Update(bytes);
  const std::string meta = absl::StrCat(
      "format = SPE1\n", "dtype = ", data.dtype == DType::kU8 ? "u8" : "f32",
      "\nshape = ", data.n, " ", data.height, " ", data.width, " ",
      data.channels, "\nlabels = ", data.labels.has_value() ? "yes" : "no",
      "\nbytes = ", bytes.size(), "\nfnv1a64 = ", HexDigest(h.digest()),
      "\nsource = ", source, "\n");
  return WriteFileBytes(path + ".meta", meta);
}

absl::StatusOr<TensorData> ReadTensorFile(const std::string& path) {
  ASSIGN_OR_RETURN(std::string bytes, ReadFileBytes(path));
  auto data = DecodeTensor(bytes);
  if (!data.ok()) {
    return absl::DataLossError(
        absl::StrCat(path, ": ", data.status().message()));
  }
  return data;
}

absl::StatusOr<TensorData> TensorFromSamples(std::span<const Sample> samples) {
  TensorData data;
  if (samples.empty()) return absl::InvalidArgumentError("no samples");
  const ImageShape shape = samples.front().image.shape;
  if (samples.size() > std::numeric_limits<uint32_t>::max()) {
    return absl::InvalidArgumentError("too many samples");
  }
  data.n = static_cast<uint32_t>(samples.size());
  data.height = static_cast<uint32_t>(shape.height);
  data.width = static_cast<uint32_t>(shape.width);
  data.channels = static_cast<uint32_t>(shape.channels);
  data.u8.reserve(data.num_values());
  bool all_labeled = true;
  for (const Sample& s : samples) {
    if (s.image.shape != shape || s.image.pixels.size() != shape.num_values()) {
      return absl::InvalidArgumentError("samples differ in shape");
    }
    data.u8.insert(data.u8.end(), s.image.pixels.begin(), s.image.pixels.end());
    all_labeled = all_labeled && s.label.has_value();
  }
  if (all_labeled) {
    data.labels.emplace();
    for (const Sample& s : samples) {
      if (*s.label < 0 || *s.label > std::numeric_limits<uint16_t>::max()) {
        return absl::InvalidArgumentError(
            absl::StrCat("label ", *s.label, " does not fit in u16"));
      }
      data.labels->push_back(static_cast<uint16_t>(*s.label));
    }
  }
  return data;
}

absl::StatusOr<std::vector<Sample>> SamplesFromTensor(const TensorData& data) {
  if (data.dtype != DType::kU8) {
    return absl::InvalidArgumentError("only u8 tensors hold images");
  }
  RETURN_IF_ERROR(CheckPayload(data));
  const ImageShape shape{static_cast<int>(data.height),
                         static_cast<int>(data.width),
                         static_cast<int>(data.channels)};
  const size_t per = shape.num_values();
  std::vector<Sample> out(data.n);
  for (uint32_t i = 0; i < data.n; ++i) {
    out[i].image.shape = shape;
    out[i].image.pixels.assign(data.u8.begin() + i * per,
                               data.u8.begin() + (i + 1) * per);
    if (data.labels.has_value()) out[i].label = (*data.labels)[i];
    out[i].provenance = DatasetIndex{static_cast<int64_t>(i)};
  }
  return out;
}

}  // namespace privsim::io
