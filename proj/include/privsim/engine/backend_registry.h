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

#ifndef PRIVSIM_ENGINE_BACKEND_REGISTRY_H_
#define PRIVSIM_ENGINE_BACKEND_REGISTRY_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privsim/data_backend/corpus.h"
#include "privsim/simulators/parametric_backend.h"

namespace privsim::engine {

// A fixed corpus served as a generation backend. With per-class slices, the
// class-c APIs only see items labeled c and use the slice's own neighbor
// table; otherwise every class shares the full corpus.
class DataSource {
 public:
  static absl::StatusOr<DataSource> Create(std::string id,
                                           data_backend::Corpus corpus);
  // Builds one slice per class from the corpus labels.
  static absl::StatusOr<DataSource> CreateSliced(std::string id,
                                                 data_backend::Corpus corpus,
                                                 const std::vector<int>& classes,
                                                 int threads = 1);

  const std::string& id() const { return id_; }
  const data_backend::Corpus& full() const { return *full_; }
  bool sliced() const { return !slices_.empty(); }
  // Corpus serving class_id (the full corpus when not sliced).
  absl::StatusOr<const data_backend::Corpus*> ForClass(
      std::optional<int> class_id) const;

 private:
  std::string id_;
  std::shared_ptr<const data_backend::Corpus> full_;
  std::map<int, std::shared_ptr<const data_backend::Corpus>> slices_;
};

enum class BackendKind { kParametric, kData };

class BackendRegistry {
 public:
  absl::Status Add(simulators::ParametricBackend backend);
  absl::Status Add(DataSource source);

  bool Contains(const std::string& id) const;
  absl::StatusOr<BackendKind> Kind(const std::string& id) const;
  absl::StatusOr<const simulators::ParametricBackend*> Parametric(
      const std::string& id) const;
  absl::StatusOr<const DataSource*> Data(const std::string& id) const;

 private:
  std::map<std::string, std::shared_ptr<const simulators::ParametricBackend>>
      parametric_;
  std::map<std::string, std::shared_ptr<const DataSource>> data_;
};

}  // namespace privsim::engine

#endif  // PRIVSIM_ENGINE_BACKEND_REGISTRY_H_
