// Copyright 2026 The CCF Authors
// SPDX-License-Identifier: Apache-2.0
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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ccf/errors.hpp"

namespace ccf {

/// DATE is days since the Unix epoch, signed 64-bit.
enum class ColumnType : uint8_t { Int64, Double, String, Bool, Date };

std::string_view column_type_name(ColumnType t);
ColumnType column_type_from_name(std::string_view name);  // throws SchemaError

/// One typed column of values plus a validity mask (true = present).
/// Null slots always hold the type's zero value, so whole-vector equality is
/// well defined and encoding never observes stale data.
class ColumnVector {
 public:
  explicit ColumnVector(ColumnType type);

  static ColumnVector int64_column(std::vector<int64_t> values,
                                   std::vector<bool> validity = {});
  static ColumnVector date_column(std::vector<int64_t> values,
                                  std::vector<bool> validity = {});
  static ColumnVector double_column(std::vector<double> values,
                                    std::vector<bool> validity = {});
  static ColumnVector string_column(std::vector<std::string> values,
                                    std::vector<bool> validity = {});
  static ColumnVector bool_column(std::vector<uint8_t> values,
                                  std::vector<bool> validity = {});

  ColumnType type() const { return type_; }
  size_t size() const { return validity_.size(); }
  bool is_null(size_t row) const { return !validity_[row]; }
  const std::vector<bool>& validity() const { return validity_; }

  int64_t int64_at(size_t row) const { return int64s()[row]; }
  int64_t date_at(size_t row) const { return int64s()[row]; }
  double double_at(size_t row) const { return doubles()[row]; }
  const std::string& string_at(size_t row) const { return strings()[row]; }
  bool bool_at(size_t row) const { return bools()[row] != 0; }

  const std::vector<int64_t>& int64s() const;
  const std::vector<double>& doubles() const;
  const std::vector<std::string>& strings() const;
  const std::vector<uint8_t>& bools() const;

  void append_int64(int64_t v);
  void append_double(double v);
  void append_string(std::string v);
  void append_bool(bool v);
  void append_null();

  bool operator==(const ColumnVector&) const = default;

 private:
  template <typename T>
  std::vector<T>& storage();
  template <typename T>
  const std::vector<T>& storage() const;

  ColumnType type_;
  std::variant<std::vector<int64_t>, std::vector<double>, std::vector<std::string>,
               std::vector<uint8_t>>
      values_;
  std::vector<bool> validity_;
};

struct ColumnSpec {
  std::string name;
  ColumnType type = ColumnType::Int64;
  bool nullable = true;

  bool operator==(const ColumnSpec&) const = default;
};

struct TableSchema {
  std::string table_name;
  std::vector<ColumnSpec> columns;

  /// Unique nonempty UTF-8 names of at most 255 bytes, at least one column.
  /// Throws SchemaError.
  void validate() const;

  /// Ordinal of `name`, or throws ProjectionError.
  uint16_t ordinal_of(std::string_view name) const;
  bool has_column(std::string_view name) const;

  bool operator==(const TableSchema&) const = default;
};

using RowGroup = std::vector<ColumnVector>;

/// In-memory table: schema plus row groups, one ColumnVector per column per
/// group, all the same length within a group.
struct Table {
  TableSchema schema;
  std::vector<RowGroup> row_groups;

  bool operator==(const Table&) const = default;
};

}  // namespace ccf
