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

#ifndef PRIVSIM_CORE_PARALLEL_H_
#define PRIVSIM_CORE_PARALLEL_H_

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace privsim {

// Calls fn(begin, end, worker) over a static partition of [0, n) into at most
// `threads` contiguous chunks. The partition depends only on (n, threads), so
// any per-worker partial results can be merged in worker order
// deterministically.
template <typename Fn>
void ParallelChunks(size_t n, int threads, Fn&& fn) {
  const size_t workers =
      std::max<size_t>(1, std::min<size_t>(static_cast<size_t>(
                                               std::max(threads, 1)),
                                           n));
  if (workers <= 1) {
    fn(size_t{0}, n, size_t{0});
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  const size_t chunk = (n + workers - 1) / workers;
  for (size_t w = 1; w < workers; ++w) {
    const size_t begin = std::min(n, w * chunk);
    const size_t end = std::min(n, begin + chunk);
    pool.emplace_back([&fn, begin, end, w] { fn(begin, end, w); });
  }
  fn(size_t{0}, std::min(n, chunk), size_t{0});
  for (std::thread& t : pool) t.join();
}

// Calls fn(i) for every i in [0, n).
template <typename Fn>
void ParallelFor(size_t n, int threads, Fn&& fn) {
  ParallelChunks(n, threads, [&fn](size_t begin, size_t end, size_t) {
    for (size_t i = begin; i < end; ++i) fn(i);
  });
}

// Number of chunks ParallelChunks will use.
inline size_t NumChunks(size_t n, int threads) {
  return std::max<size_t>(
      1, std::min<size_t>(static_cast<size_t>(std::max(threads, 1)), n));
}

}  // namespace privsim

#endif  // PRIVSIM_CORE_PARALLEL_H_
