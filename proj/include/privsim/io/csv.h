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

#ifndef PRIVSIM_IO_CSV_H_
#define PRIVSIM_IO_CSV_H_

#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"

namespace privsim::io {

// Minimal CSV table. Cells are quoted only when they contain a comma, quote
// or newline. Numbers are printed with %.10g so files are reproducible.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header)
      : header_(std::move(header)) {}

  class Row {
   public:
    Row& Add(const std::string& cell);
    Row& Add(const char* cell) { return Add(std::string(cell)); }
    Row& Add(double value);
    Row& Add(int64_t value);
    Row& Add(int value) { return Add(static_cast<int64_t>(value)); }
    Row& Add(size_t value) { return Add(static_cast<int64_t>(value)); }
    Row& Add(std::optional<double> value);  // empty cell when absent

   private:
    friend class CsvTable;
    std::vector<std::string> cells_;
  };

  Row& AddRow();
  size_t num_rows() const { return rows_.size(); }
  std::string ToString() const;
  absl::Status Write(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

std::string FormatNumber(double value);

}  // namespace privsim::io

#endif  // PRIVSIM_IO_CSV_H_
