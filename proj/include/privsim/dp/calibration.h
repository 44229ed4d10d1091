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

// Noise calibration for T adaptive Gaussian releases.
//
// T releases of a sensitivity-1 statistic with noise N(0, sigma^2) compose to
// one Gaussian release with L2 sensitivity sqrt(T). The analytic Gaussian
// mechanism (Balle & Wang, 2018) is (epsilon, delta)-DP iff
//
//   Phi(D / (2 s) - e s / D) - exp(e) Phi(-D / (2 s) - e s / D) <= delta
//
// with D the sensitivity and s the noise standard deviation.

#ifndef PRIVSIM_DP_CALIBRATION_H_
#define PRIVSIM_DP_CALIBRATION_H_

#include <cstdint>

#include "absl/status/statusor.h"

namespace privsim::dp {

// Left-hand side of the analytic Gaussian condition.
double AnalyticGaussianDelta(double epsilon, double sigma, double sensitivity);

bool AnalyticGaussianHolds(double epsilon, double delta, double sigma,
                           double sensitivity);

// Smallest noise multiplier for which T compositions are (epsilon, delta)-DP.
// Bisection runs to 1e-12 relative width on the unit-sensitivity problem and
// the result is scaled by sqrt(T), so sigma(T) / sigma(1) == sqrt(T) up to
// rounding. Fails with OutOfRange if no bracket is found.
absl::StatusOr<double> CalibrateSigma(double epsilon, double delta,
                                      int iterations);

enum class LogBase { kNatural, kTwo, kTen };

// delta = 1 / (n * log(n)). Requires n >= 2.
absl::StatusOr<double> DefaultDelta(int64_t num_private,
                                    LogBase base = LogBase::kNatural);

}  // namespace privsim::dp

#endif  // PRIVSIM_DP_CALIBRATION_H_
