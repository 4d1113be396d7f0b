// Copyright 2026 The Juggle Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef JUGGLE_CSV_HPP_
#define JUGGLE_CSV_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace juggle {

/// Formats a double with enough digits to round-trip, deterministically.
std::string format_double(double value);

/// Row-oriented table with string cells and a fixed header. All numeric cells
/// are formatted at insertion time so serialization is byte-deterministic.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void set_columns(std::vector<std::string> columns) { columns_ = std::move(columns); }
  const std::vector<std::string>& columns() const { return columns_; }

  class RowBuilder {
   public:
    explicit RowBuilder(Table* table) : table_(table) {}
    RowBuilder& add(double value);
    RowBuilder& add(int value);
    RowBuilder& add(std::int64_t value);
    RowBuilder& add(const std::string& value);
    ~RowBuilder();

   private:
    Table* table_;
    std::vector<std::string> cells_;
  };

  RowBuilder row() { return RowBuilder(this); }
  void add_row(std::vector<std::string> cells);

  std::size_t row_count() const { return rows_.size(); }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  std::string to_csv() const;
  void write_csv(const std::string& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace juggle

#endif  // JUGGLE_CSV_HPP_
