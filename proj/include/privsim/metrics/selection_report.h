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

// Neighborhood quality of voted-for versus ignored samples in a data-backend
// run. For iteration t, the population voted on is S_{t-1}; a corpus item in
// it is "selected" when some private sample has it as nearest neighbor. The
// gamma corpus neighbors of each group are pooled (as a set, across classes)
// and compared to the private set by Frechet distance.

#ifndef PRIVSIM_METRICS_SELECTION_REPORT_H_
#define PRIVSIM_METRICS_SELECTION_REPORT_H_

#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privsim/engine/backend_registry.h"
#include "privsim/engine/run_pe.h"
#include "privsim/metrics/frechet.h"

namespace privsim::metrics {

struct SelectionReportRow {
  int iteration = 0;
  size_t num_selected = 0;    // distinct corpus items
  size_t num_unselected = 0;
  std::optional<double> fed_selected;
  std::optional<double> fed_unselected;  // absent when nothing is unselected
};

absl::StatusOr<std::vector<SelectionReportRow>> SelectedVsUnselectedReport(
    const engine::GenerationTrace& trace, const engine::DataSource& source,
    const EmbeddingMatrix& private_embeds, size_t gamma,
    double ridge = kDefaultRidge);

}  // namespace privsim::metrics

#endif  // PRIVSIM_METRICS_SELECTION_REPORT_H_
