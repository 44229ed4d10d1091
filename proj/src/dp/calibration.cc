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

#include "privsim/dp/calibration.h"

#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace privsim::dp {
namespace {

// log Phi(x); -inf when Phi(x) underflows.
double LogNormalCdf(double x) {
  const double p = 0.5 * std::erfc(-x / std::sqrt(2.0));
  return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

constexpr int kMaxBracketSteps = 200;
constexpr double kRelativeWidth = 1e-12;

}  // namespace

double AnalyticGaussianDelta(double epsilon, double sigma,
                             double sensitivity) {
  if (sigma <= 0.0) return 1.0;
  const double a = sensitivity / (2.0 * sigma) - epsilon * sigma / sensitivity;
  const double b = -sensitivity / (2.0 * sigma) - epsilon * sigma / sensitivity;
  const double log_second = epsilon + LogNormalCdf(b);
  const double second = std::isinf(log_second) ? 0.0 : std::exp(log_second);
  return NormalCdf(a) - second;
}

bool AnalyticGaussianHolds(double epsilon, double delta, double sigma,
                           double sensitivity) {
  return AnalyticGaussianDelta(epsilon, sigma, sensitivity) <= delta;
}

absl::StatusOr<double> CalibrateSigma(double epsilon, double delta,
                                      int iterations) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be > 0, got ", epsilon));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must be in (0, 1), got ", delta));
  }
  if (iterations < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("iteration count must be >= 1, got ", iterations));
  }
  // Unit sensitivity; the condition only depends on sigma / sensitivity.
  double hi = 1.0;
  int steps = 0;
  while (!AnalyticGaussianHolds(epsilon, delta, hi, 1.0)) {
    hi *= 2.0;
    if (++steps > kMaxBracketSteps || !std::isfinite(hi)) {
      return absl::OutOfRangeError(absl::StrCat(
          "no noise level satisfies (", epsilon, ", ", delta, ")-DP"));
    }
  }
  double lo = hi / 2.0;
  steps = 0;
  while (AnalyticGaussianHolds(epsilon, delta, lo, 1.0)) {
    hi = lo;
    lo /= 2.0;
    if (++steps > kMaxBracketSteps || lo == 0.0) {
      return absl::OutOfRangeError(absl::StrCat(
          "noise bracket collapsed for (", epsilon, ", ", delta, ")"));
    }
  }
  while ((hi - lo) > kRelativeWidth * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (AnalyticGaussianHolds(epsilon, delta, mid, 1.0)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double sensitivity = std::sqrt(static_cast<double>(iterations));
  double sigma = hi * sensitivity;
  // Scaling can move sigma / sensitivity by an ulp across the boundary.
  for (int i = 0; i < 64 &&
                  !AnalyticGaussianHolds(epsilon, delta, sigma, sensitivity);
       ++i) {
    sigma = std::nextafter(sigma, std::numeric_limits<double>::infinity());
  }
  return sigma;
}

absl::StatusOr<double> DefaultDelta(int64_t num_private, LogBase base) {
  if (num_private < 2) {
    return absl::InvalidArgumentError(absl::StrCat(
        "default delta needs at least 2 private samples, got ", num_private));
  }
  const double n = static_cast<double>(num_private);
  double log_n = std::log(n);
  if (base == LogBase::kTwo) log_n = std::log2(n);
  if (base == LogBase::kTen) log_n = std::log10(n);
  return 1.0 / (n * log_n);
}

}  // namespace privsim::dp
