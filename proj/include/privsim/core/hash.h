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

#ifndef PRIVSIM_CORE_HASH_H_
#define PRIVSIM_CORE_HASH_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace privsim {

// Incremental 64-bit FNV-1a. Used for content hashes in file sidecars and
// manifests; not a cryptographic hash.
class Fnv1a64 {
 public:
  void Update(std::span<const uint8_t> bytes) {
    for (uint8_t b : bytes) {
      state_ ^= b;
      state_ *= 0x100000001b3ULL;
    }
  }
  void Update(std::string_view s) {
    Update(std::span<const uint8_t>(
        reinterpret_cast<const uint8_t*>(s.data()), s.size()));
  }
  uint64_t digest() const { return state_; }

 private:
  uint64_t state_ = 0xcbf29ce484222325ULL;
};

// Fixed-width lowercase hex.
std::string HexDigest(uint64_t digest);

}  // namespace privsim

#endif  // PRIVSIM_CORE_HASH_H_
