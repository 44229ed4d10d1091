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

// Sectioned key/value configs:
//
//   # comment
//   [section]
//   key = value        ; trailing comments start with '#' or ';'
//
// Keys before the first section header belong to section "". Lists are
// comma-separated. Getters remember which keys were read so typos can be
// reported with UnusedKeys().

#ifndef PRIVSIM_IO_CONFIG_H_
#define PRIVSIM_IO_CONFIG_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"

namespace privsim::io {

class Config {
 public:
  static absl::StatusOr<Config> Parse(std::string_view text);
  static absl::StatusOr<Config> Load(const std::string& path);

  bool Has(const std::string& section, const std::string& key) const;
  std::vector<std::string> Sections() const;
  // Keys of one section, in sorted order.
  std::vector<std::string> Keys(const std::string& section) const;

  std::optional<std::string> Get(const std::string& section,
                                 const std::string& key) const;
  std::string GetString(const std::string& section, const std::string& key,
                        const std::string& fallback) const;
  absl::StatusOr<std::string> RequireString(const std::string& section,
                                            const std::string& key) const;
  absl::StatusOr<int64_t> GetInt(const std::string& section,
                                 const std::string& key,
                                 int64_t fallback) const;
  absl::StatusOr<double> GetDouble(const std::string& section,
                                   const std::string& key,
                                   double fallback) const;
  absl::StatusOr<bool> GetBool(const std::string& section,
                               const std::string& key, bool fallback) const;
  absl::StatusOr<std::vector<double>> GetDoubleList(
      const std::string& section, const std::string& key) const;
  // Accepts "a-b" ranges as well as single integers: "0-9" or "1, 3, 5".
  absl::StatusOr<std::vector<int>> GetIntList(const std::string& section,
                                              const std::string& key) const;
  std::vector<std::string> GetStringList(const std::string& section,
                                         const std::string& key) const;

  void Set(const std::string& section, const std::string& key,
           std::string value);

  // Keys never read through a getter, as "section.key". With `sections`
  // non-empty only sections named X or X.<anything> for X in `sections` are
  // checked.
  std::vector<std::string> UnusedKeys(
      const std::vector<std::string>& sections = {}) const;

  // Normalized text (sorted sections and keys); stable input for hashing.
  std::string Canonical() const;

  // Directory of the loaded file, for resolving relative paths.
  const std::string& base_dir() const { return base_dir_; }
  std::string ResolvePath(const std::string& path) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> values_;
  mutable std::set<std::pair<std::string, std::string>> used_;
  std::string base_dir_;
};

std::vector<std::string> SplitList(std::string_view value);

}  // namespace privsim::io

#endif  // PRIVSIM_IO_CONFIG_H_
