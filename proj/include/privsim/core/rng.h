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

// Deterministic random streams.
//
// Every random decision in a run is drawn from an RngStream. Streams are
// identified by a 64-bit key; child streams are derived by hashing the parent
// key with a list of tags (module name, iteration, class, ...), so the draws a
// component sees depend only on the root seed and its tag path and never on
// the order in which other components consumed randomness.
//
// All distributions are implemented here on top of std::mt19937_64 (whose
// output sequence is fixed by the standard) so that runs are bit-identical
// across standard library implementations.

#ifndef PRIVSIM_CORE_RNG_H_
#define PRIVSIM_CORE_RNG_H_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <variant>

#include "absl/status/statusor.h"

namespace privsim {

using RngTag = std::variant<std::string_view, int64_t>;

class RngStream {
 public:
  explicit RngStream(uint64_t seed);

  // Identity of the stream. Two streams with the same key produce the same
  // draws.
  uint64_t key() const { return key_; }

  // Child stream keyed by (this->key(), tags). Derivation does not look at or
  // advance this stream's state. At least one tag is required.
  template <typename... Tags>
  RngStream Substream(RngTag first, Tags... rest) const {
    const RngTag tags[] = {first, RngTag(rest)...};
    return FromKey(MixTags(key_, tags));
  }

  uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of precision.
  double Uniform01();
  // Uniform on the open interval (0, 1).
  double UniformOpen01();
  // Uniform on [lo, hi]; returns lo when lo == hi.
  double Uniform(double lo, double hi);
  // Uniform integer in [0, n). Requires n > 0. Unbiased (rejection sampling).
  uint64_t UniformIndex(uint64_t n);
  bool Bernoulli(double p);
  // Standard normal via the Marsaglia polar method.
  double Normal();
  // Laplace(0, scale) by inverse CDF.
  double Laplace(double scale);

 private:
  struct KeyTag {};
  RngStream(KeyTag, uint64_t key);
  static RngStream FromKey(uint64_t key) { return RngStream(KeyTag{}, key); }
  static uint64_t MixTags(uint64_t key, std::span<const RngTag> tags);

  friend absl::StatusOr<RngStream> DeriveSubstream(
      const RngStream& root, std::span<const RngTag> tags);

  uint64_t key_;
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

// Runtime-tagged derivation; fails on an empty tag list.
absl::StatusOr<RngStream> DeriveSubstream(const RngStream& root,
                                          std::span<const RngTag> tags);

// SplitMix64 finalizer.
uint64_t Mix64(uint64_t x);

}  // namespace privsim

#endif  // PRIVSIM_CORE_RNG_H_
