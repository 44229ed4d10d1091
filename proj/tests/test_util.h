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

// Shared helpers for the unit tests.

#ifndef PRIVSIM_TESTS_TEST_UTIL_H_
#define PRIVSIM_TESTS_TEST_UTIL_H_

#include <cmath>
#include <filesystem>
#include <string>

#include "gtest/gtest.h"
#include "privsim/core/embedding_matrix.h"
#include "privsim/core/rng.h"

#define PRIVSIM_ASSERT_OK(expr)                          \
  do {                                                   \
    const auto& _st = (expr);                            \
    ASSERT_TRUE(_st.ok()) << #expr << ": " << _st;       \
  } while (0)

#define PRIVSIM_EXPECT_OK(expr)                          \
  do {                                                   \
    const auto& _st = (expr);                            \
    EXPECT_TRUE(_st.ok()) << #expr << ": " << _st;       \
  } while (0)

namespace privsim::testing {

// n x d matrix with entries uniform on [lo, hi).
inline EmbeddingMatrix RandomMatrix(size_t n, size_t d, RngStream& rng,
                                    double lo = 0.0, double hi = 1.0) {
  EmbeddingMatrix m(n, d);
  for (size_t i = 0; i < n; ++i) {
    for (double& v : m.row(i)) v = rng.Uniform(lo, hi);
  }
  return m;
}

// Fresh, empty directory under the gtest temp dir.
inline std::string ScratchDir(const std::string& name) {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  std::filesystem::path dir =
      std::filesystem::path(::testing::TempDir()) / "privsim" /
      (std::string(info->test_suite_name()) + "." + info->name() + "." + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

// Half-width of a binomial(n, p) frequency band of `z` standard deviations.
inline double BinomialBand(double p, size_t n, double z) {
  return z * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace privsim::testing

#endif  // PRIVSIM_TESTS_TEST_UTIL_H_
