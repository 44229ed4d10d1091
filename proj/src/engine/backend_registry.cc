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

#include "privsim/engine/backend_registry.h"

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privsim/core/status_macros.h"

namespace privsim::engine {

absl::StatusOr<DataSource> DataSource::Create(std::string id,
                                              data_backend::Corpus corpus) {
  DataSource s;
  s.id_ = std::move(id);
  s.full_ = std::make_shared<const data_backend::Corpus>(std::move(corpus));
  return s;
}

absl::StatusOr<DataSource> DataSource::CreateSliced(
    std::string id, data_backend::Corpus corpus,
    const std::vector<int>& classes, int threads) {
  if (!corpus.labeled()) {
    return absl::FailedPreconditionError(
        absl::StrCat("corpus '", id, "' has no labels to slice by"));
  }
  ASSIGN_OR_RETURN(DataSource s, Create(std::move(id), std::move(corpus)));
  for (int c : classes) {
    ASSIGN_OR_RETURN(data_backend::Corpus slice,
                     s.full_->ClassSlice(c, s.full_->k_max(), threads));
    s.slices_[c] =
        std::make_shared<const data_backend::Corpus>(std::move(slice));
  }
  return s;
}

absl::StatusOr<const data_backend::Corpus*> DataSource::ForClass(
    std::optional<int> class_id) const {
  if (slices_.empty()) return full_.get();
  if (!class_id.has_value()) {
    return absl::FailedPreconditionError(
        "sliced corpus used without a class");
  }
  auto it = slices_.find(*class_id);
  if (it == slices_.end()) {
    return absl::NotFoundError(
        absl::StrCat("no corpus slice for class ", *class_id));
  }
  return it->second.get();
}

absl::Status BackendRegistry::Add(simulators::ParametricBackend backend) {
  const std::string id = backend.id();
  if (Contains(id)) {
    return absl::AlreadyExistsError(absl::StrCat("duplicate backend ", id));
  }
  parametric_[id] = std::make_shared<const simulators::ParametricBackend>(
      std::move(backend));
  return absl::OkStatus();
}

absl::Status BackendRegistry::Add(DataSource source) {
  const std::string id = source.id();
  if (Contains(id)) {
    return absl::AlreadyExistsError(absl::StrCat("duplicate backend ", id));
  }
  data_[id] = std::make_shared<const DataSource>(std::move(source));
  return absl::OkStatus();
}

bool BackendRegistry::Contains(const std::string& id) const {
  return parametric_.contains(id) || data_.contains(id);
}

absl::StatusOr<BackendKind> BackendRegistry::Kind(
    const std::string& id) const {
  if (parametric_.contains(id)) return BackendKind::kParametric;
  if (data_.contains(id)) return BackendKind::kData;
  return absl::NotFoundError(absl::StrCat("unknown backend '", id, "'"));
}

absl::StatusOr<const simulators::ParametricBackend*>
BackendRegistry::Parametric(const std::string& id) const {
  auto it = parametric_.find(id);
  if (it == parametric_.end()) {
    return absl::NotFoundError(
        absl::StrCat("no parametric backend '", id, "'"));
  }
  return it->second.get();
}

absl::StatusOr<const DataSource*> BackendRegistry::Data(
    const std::string& id) const {
  auto it = data_.find(id);
  if (it == data_.end()) {
    return absl::NotFoundError(absl::StrCat("no data backend '", id, "'"));
  }
  return it->second.get();
}

}  // namespace privsim::engine
