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

#include "privsim/io/config.h"

#include <filesystem>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "privsim/core/status_macros.h"
#include "privsim/io/tensor_file.h"

namespace privsim::io {
namespace {

std::string_view Strip(std::string_view s) {
  const char* ws = " \t\r\n";
  const size_t b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view StripComment(std::string_view line) {
  const size_t pos = line.find_first_of("#;");
  return pos == std::string_view::npos ? line : line.substr(0, pos);
}

absl::Status BadValue(const std::string& section, const std::string& key,
                      const std::string& value, const char* expected) {
  return absl::InvalidArgumentError(absl::StrCat(
      "[", section, "] ", key, " = '", value, "' is not ", expected));
}

}  // namespace

std::vector<std::string> SplitList(std::string_view value) {
  std::vector<std::string> out;
  for (std::string_view part : Split(value, ',')) {
    part = Strip(part);
    if (!part.empty()) out.emplace_back(part);
  }
  return out;
}

absl::StatusOr<Config> Config::Parse(std::string_view text) {
  Config config;
  std::string section;
  int line_no = 0;
  for (std::string_view raw : Split(text, '\n')) {
    ++line_no;
    std::string_view line = Strip(StripComment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        return absl::InvalidArgumentError(
            absl::StrCat("line ", line_no, ": unterminated section header"));
      }
      section = std::string(
          Strip(line.substr(1, line.size() - 2)));
      config.values_[section];
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": expected key = value"));
    }
    const std::string key(Strip(line.substr(0, eq)));
    const std::string value(Strip(line.substr(eq + 1)));
    if (key.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": empty key"));
    }
    auto& entries = config.values_[section];
    if (entries.contains(key)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_no, ": duplicate key '", key, "' in [", section, "]"));
    }
    entries[key] = value;
  }
  return config;
}

absl::StatusOr<Config> Config::Load(const std::string& path) {
  auto text = ReadFileBytes(path);
  if (!text.ok()) return text.status();
  auto config = Parse(*text);
  if (!config.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": ", config.status().message()));
  }
  config->base_dir_ = std::filesystem::path(path).parent_path().string();
  return config;
}

bool Config::Has(const std::string& section, const std::string& key) const {
  auto it = values_.find(section);
  return it != values_.end() && it->second.contains(key);
}

std::vector<std::string> Config::Sections() const {
  std::vector<std::string> out;
  for (const auto& [name, entries] : values_) out.push_back(name);
  return out;
}

std::vector<std::string> Config::Keys(const std::string& section) const {
  std::vector<std::string> out;
  auto it = values_.find(section);
  if (it == values_.end()) return out;
  for (const auto& [key, value] : it->second) out.push_back(key);
  return out;
}

std::optional<std::string> Config::Get(const std::string& section,
                                       const std::string& key) const {
  auto it = values_.find(section);
  if (it == values_.end()) return std::nullopt;
  auto kv = it->second.find(key);
  if (kv == it->second.end()) return std::nullopt;
  used_.insert({section, key});
  return kv->second;
}

std::string Config::GetString(const std::string& section,
                              const std::string& key,
                              const std::string& fallback) const {
  return Get(section, key).value_or(fallback);
}

absl::StatusOr<std::string> Config::RequireString(
    const std::string& section, const std::string& key) const {
  auto v = Get(section, key);
  if (!v.has_value() || v->empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("missing [", section, "] ", key));
  }
  return *v;
}

absl::StatusOr<int64_t> Config::GetInt(const std::string& section,
                                       const std::string& key,
                                       int64_t fallback) const {
  auto v = Get(section, key);
  if (!v.has_value()) return fallback;
  int64_t out;
  if (!absl::SimpleAtoi(*v, &out)) return BadValue(section, key, *v, "an integer");
  return out;
}

absl::StatusOr<double> Config::GetDouble(const std::string& section,
                                         const std::string& key,
                                         double fallback) const {
  auto v = Get(section, key);
  if (!v.has_value()) return fallback;
  double out;
  if (!absl::SimpleAtod(*v, &out)) return BadValue(section, key, *v, "a number");
  return out;
}

absl::StatusOr<bool> Config::GetBool(const std::string& section,
                                     const std::string& key,
                                     bool fallback) const {
  auto v = Get(section, key);
  if (!v.has_value()) return fallback;
  bool out;
  if (!absl::SimpleAtob(*v, &out)) return BadValue(section, key, *v, "a boolean");
  return out;
}

absl::StatusOr<std::vector<double>> Config::GetDoubleList(
    const std::string& section, const std::string& key) const {
  std::vector<double> out;
  auto v = Get(section, key);
  if (!v.has_value()) return out;
  for (const std::string& item : SplitList(*v)) {
    double d;
    if (!absl::SimpleAtod(item, &d)) {
      return BadValue(section, key, *v, "a list of numbers");
    }
    out.push_back(d);
  }
  return out;
}

absl::StatusOr<std::vector<int>> Config::GetIntList(
    const std::string& section, const std::string& key) const {
  std::vector<int> out;
  auto v = Get(section, key);
  if (!v.has_value()) return out;
  for (const std::string& item : SplitList(*v)) {
    std::vector<std::string_view> ends = Split(item, '-');
    int lo, hi;
    if (ends.size() == 1 && absl::SimpleAtoi(std::string(ends[0]), &lo)) {
      out.push_back(lo);
    } else if (ends.size() == 2 && absl::SimpleAtoi(std::string(ends[0]), &lo) &&
               absl::SimpleAtoi(std::string(ends[1]), &hi) && lo <= hi) {
      for (int i = lo; i <= hi; ++i) out.push_back(i);
    } else {
      return BadValue(section, key, *v, "a list of integers or ranges");
    }
  }
  return out;
}

std::vector<std::string> Config::GetStringList(const std::string& section,
                                               const std::string& key) const {
  auto v = Get(section, key);
  return v.has_value() ? SplitList(*v) : std::vector<std::string>{};
}

void Config::Set(const std::string& section, const std::string& key,
                 std::string value) {
  values_[section][key] = std::move(value);
}

std::vector<std::string> Config::UnusedKeys(
    const std::vector<std::string>& sections) const {
  auto selected = [&](const std::string& name) {
    if (sections.empty()) return true;
    for (const std::string& s : sections) {
      if (name == s || (name.size() > s.size() && name.starts_with(s) &&
                        name[s.size()] == '.')) {
        return true;
      }
    }
    return false;
  };
  std::vector<std::string> out;
  for (const auto& [section, entries] : values_) {
    if (!selected(section)) continue;
    for (const auto& [key, value] : entries) {
      if (!used_.contains({section, key})) {
        out.push_back(section.empty() ? key : absl::StrCat(section, ".", key));
      }
    }
  }
  return out;
}

std::string Config::Canonical() const {
  std::string out;
  for (const auto& [section, entries] : values_) {
    absl::StrAppend(&out, "[", section, "]\n");
    for (const auto& [key, value] : entries) {
      absl::StrAppend(&out, key, " = ", value, "\n");
    }
  }
  return out;
}

std::string Config::ResolvePath(const std::string& path) const {
  if (path.empty() || std::filesystem::path(path).is_absolute() ||
      base_dir_.empty()) {
    return path;
  }
  return (std::filesystem::path(base_dir_) / path).lexically_normal().string();
}

}  // namespace privsim::io
