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

#ifndef PRIVSIM_METRICS_SUMMARY_H_
#define PRIVSIM_METRICS_SUMMARY_H_

#include <span>

#include "privsim/core/sample.h"

namespace privsim::metrics {

// Shannon entropy in nats of weights / sum(weights). Zero for an all-zero
// vector.
double HistogramEntropy(std::span<const double> weights);

// Number of distinct pixel buffers.
size_t UniqueSampleCount(std::span<const Sample> samples);

}  // namespace privsim::metrics

#endif  // PRIVSIM_METRICS_SUMMARY_H_
