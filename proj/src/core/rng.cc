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

#include "privsim/core/rng.h"

#include <cmath>
#include <limits>

#include "absl/status/status.h"

namespace privsim {
namespace {

constexpr uint64_t kStringTagSalt = 0x5bd1e9955bd1e995ULL;
constexpr uint64_t kIntTagSalt = 0x27d4eb2f165667c5ULL;

uint64_t HashString(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

uint64_t Mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(uint64_t seed) : RngStream(KeyTag{}, Mix64(seed)) {}

RngStream::RngStream(KeyTag, uint64_t key) : key_(key), engine_(key) {}

uint64_t RngStream::MixTags(uint64_t key, std::span<const RngTag> tags) {
  uint64_t h = key;
  for (const RngTag& tag : tags) {
    uint64_t v;
    if (const auto* s = std::get_if<std::string_view>(&tag)) {
      v = Mix64(HashString(*s) ^ kStringTagSalt);
    } else {
      v = Mix64(static_cast<uint64_t>(std::get<int64_t>(tag)) ^ kIntTagSalt);
    }
    h = Mix64(h ^ v);
  }
  return h;
}

absl::StatusOr<RngStream> DeriveSubstream(const RngStream& root,
                                          std::span<const RngTag> tags) {
  if (tags.empty()) {
    return absl::InvalidArgumentError("substream derivation needs >= 1 tag");
  }
  return RngStream::FromKey(RngStream::MixTags(root.key(), tags));
}

double RngStream::Uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::UniformOpen01() {
  // (k + 0.5) / 2^53 for k in [0, 2^53) never hits 0 or 1.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::Uniform(double lo, double hi) {
  if (lo == hi) return lo;
  const double v = lo + (hi - lo) * Uniform01();
  return v > hi ? hi : v;
}

uint64_t RngStream::UniformIndex(uint64_t n) {
  // Lemire's nearly-divisionless method.
  uint64_t x = engine_();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  uint64_t low = static_cast<uint64_t>(m);
  if (low < n) {
    const uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = engine_();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<uint64_t>(m);
    }
  }
  return static_cast<uint64_t>(m >> 64);
}

bool RngStream::Bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return Uniform01() < p;
}

double RngStream::Normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * Uniform01() - 1.0;
    v = 2.0 * Uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  has_spare_normal_ = true;
  return u * f;
}

double RngStream::Laplace(double scale) {
  const double u = UniformOpen01() - 0.5;
  const double mag = -scale * std::log1p(-2.0 * std::fabs(u));
  return u < 0 ? -mag : mag;
}

}  // namespace privsim
