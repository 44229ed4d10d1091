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

#include "privsim/io/csv.h"

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_replace.h"
#include "privsim/io/tensor_file.h"

namespace privsim::io {
namespace {

std::string Escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  return absl::StrCat("\"", absl::StrReplaceAll(cell, {{"\"", "\"\""}}), "\"");
}

void AppendLine(std::string& out, const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += Escape(cells[i]);
  }
  out.push_back('\n');
}

}  // namespace

std::string FormatNumber(double value) { return absl::StrFormat("%.10g", value); }

CsvTable::Row& CsvTable::Row::Add(const std::string& cell) {
  cells_.push_back(cell);
  return *this;
}

CsvTable::Row& CsvTable::Row::Add(double value) {
  cells_.push_back(FormatNumber(value));
  return *this;
}

CsvTable::Row& CsvTable::Row::Add(int64_t value) {
  cells_.push_back(absl::StrCat(value));
  return *this;
}

CsvTable::Row& CsvTable::Row::Add(std::optional<double> value) {
  cells_.push_back(value.has_value() ? FormatNumber(*value) : "");
  return *this;
}

CsvTable::Row& CsvTable::AddRow() { return rows_.emplace_back(); }

std::string CsvTable::ToString() const {
  std::string out;
  AppendLine(out, header_);
  for (const Row& r : rows_) AppendLine(out, r.cells_);
  return out;
}

absl::Status CsvTable::Write(const std::string& path) const {
  return WriteFileBytes(path, ToString());
}

}  // namespace privsim::io
