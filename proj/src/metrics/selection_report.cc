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

#include "privsim/metrics/selection_report.h"

#include <map>
#include <set>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privsim/core/status_macros.h"

namespace privsim::metrics {
namespace {

absl::StatusOr<std::optional<double>> PoolDistance(
    const std::set<int64_t>& pool, const data_backend::Corpus& full,
    const FrechetReference& reference) {
  if (pool.size() < 2) return std::optional<double>();
  std::vector<size_t> rows;
  rows.reserve(pool.size());
  for (int64_t id : pool) {
    std::optional<size_t> local = full.LocalIndex(id);
    if (!local.has_value()) {
      return absl::InternalError(absl::StrCat("corpus id ", id, " unknown"));
    }
    rows.push_back(*local);
  }
  ASSIGN_OR_RETURN(double d, reference.Distance(full.embeddings().Gather(rows)));
  return std::optional<double>(d);
}

}  // namespace

absl::StatusOr<std::vector<SelectionReportRow>> SelectedVsUnselectedReport(
    const engine::GenerationTrace& trace, const engine::DataSource& source,
    const EmbeddingMatrix& private_embeds, size_t gamma, double ridge) {
  if (gamma < 1) return absl::InvalidArgumentError("gamma must be >= 1");
  ASSIGN_OR_RETURN(FrechetReference reference,
                   FrechetReference::Create(private_embeds, ridge));
  std::vector<SelectionReportRow> rows;
  for (size_t t = 1; t < trace.records.size(); ++t) {
    const auto& voted_on = trace.records[t - 1];
    const auto& current = trace.records[t];
    if (voted_on.size() != current.size()) {
      return absl::InvalidArgumentError("trace groups differ across iterations");
    }
    std::set<int64_t> selected_items, unselected_items;
    std::set<int64_t> selected_pool, unselected_pool;
    for (size_t g = 0; g < current.size(); ++g) {
      const engine::IterationRecord& rec = current[g];
      const engine::IterationRecord& prev = voted_on[g];
      if (!rec.histogram.has_value() ||
          rec.histogram->size() != prev.population.size()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "iteration ", rec.iteration, " has no histogram over S_t-1"));
      }
      ASSIGN_OR_RETURN(const data_backend::Corpus* corpus,
                       source.ForClass(rec.label));
      if (gamma > corpus->k_max()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "gamma ", gamma, " exceeds neighbor table size ", corpus->k_max()));
      }
      // Per corpus item: voted for through any of its copies?
      std::map<size_t, bool> voted;
      for (size_t i = 0; i < prev.population.size(); ++i) {
        const auto* idx =
            std::get_if<DatasetIndex>(&prev.population[i].provenance);
        std::optional<size_t> local;
        if (idx != nullptr) local = corpus->LocalIndex(idx->value);
        if (!local.has_value()) {
          return absl::FailedPreconditionError(absl::StrCat(
              "iteration ", prev.iteration,
              " population is not drawn from corpus '", source.id(), "'"));
        }
        voted[*local] = voted[*local] || rec.histogram->raw[i] > 0;
      }
      for (const auto& [local, is_selected] : voted) {
        (is_selected ? selected_items : unselected_items)
            .insert(corpus->global_id(local));
        std::set<int64_t>& pool = is_selected ? selected_pool : unselected_pool;
        auto neighbors = corpus->neighbors(local);
        for (size_t j = 0; j < gamma; ++j) {
          pool.insert(corpus->global_id(neighbors[j]));
        }
      }
    }
    SelectionReportRow row;
    row.iteration = static_cast<int>(t);
    row.num_selected = selected_items.size();
    row.num_unselected = unselected_items.size();
    ASSIGN_OR_RETURN(row.fed_selected,
                     PoolDistance(selected_pool, source.full(), reference));
    if (!unselected_items.empty()) {
      ASSIGN_OR_RETURN(row.fed_unselected,
                       PoolDistance(unselected_pool, source.full(), reference));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace privsim::metrics
