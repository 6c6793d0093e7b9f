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

#include "ccf/column.hpp"

#include <unordered_set>

#include "ccf/bytes.hpp"

namespace ccf {

std::string_view column_type_name(ColumnType t) {
  switch (t) {
    case ColumnType::Int64: return "INT64";
    case ColumnType::Double: return "DOUBLE";
    case ColumnType::String: return "STRING";
    case ColumnType::Bool: return "BOOL";
    case ColumnType::Date: return "DATE";
  }
  throw SchemaError("unknown column type");
}

ColumnType column_type_from_name(std::string_view name) {
  if (name == "INT64") return ColumnType::Int64;
  if (name == "DOUBLE") return ColumnType::Double;
  if (name == "STRING") return ColumnType::String;
  if (name == "BOOL") return ColumnType::Bool;
  if (name == "DATE") return ColumnType::Date;
  throw SchemaError("unknown column type name: " + std::string(name));
}

namespace {

template <typename T>
std::vector<bool> full_validity(const std::vector<T>& values, std::vector<bool> validity) {
  if (validity.empty()) return std::vector<bool>(values.size(), true);
  if (validity.size() != values.size()) throw SchemaError("validity length mismatch");
  return validity;
}

template <typename T>
void zero_nulls(std::vector<T>& values, const std::vector<bool>& validity) {
  for (size_t i = 0; i < values.size(); ++i) {
    if (!validity[i]) values[i] = T{};
  }
}

}  // namespace

ColumnVector::ColumnVector(ColumnType type) : type_(type) {
  switch (type) {
    case ColumnType::Int64:
    case ColumnType::Date: values_ = std::vector<int64_t>{}; break;
    case ColumnType::Double: values_ = std::vector<double>{}; break;
    case ColumnType::String: values_ = std::vector<std::string>{}; break;
    case ColumnType::Bool: values_ = std::vector<uint8_t>{}; break;
  }
}

ColumnVector ColumnVector::int64_column(std::vector<int64_t> values, std::vector<bool> validity) {
  ColumnVector v(ColumnType::Int64);
  v.validity_ = full_validity(values, std::move(validity));
  zero_nulls(values, v.validity_);
  v.values_ = std::move(values);
  return v;
}

ColumnVector ColumnVector::date_column(std::vector<int64_t> values, std::vector<bool> validity) {
  ColumnVector v = int64_column(std::move(values), std::move(validity));
  v.type_ = ColumnType::Date;
  return v;
}

ColumnVector ColumnVector::double_column(std::vector<double> values, std::vector<bool> validity) {
  ColumnVector v(ColumnType::Double);
  v.validity_ = full_validity(values, std::move(validity));
  zero_nulls(values, v.validity_);
  v.values_ = std::move(values);
  return v;
}

ColumnVector ColumnVector::string_column(std::vector<std::string> values,
                                         std::vector<bool> validity) {
  ColumnVector v(ColumnType::String);
  v.validity_ = full_validity(values, std::move(validity));
  zero_nulls(values, v.validity_);
  v.values_ = std::move(values);
  return v;
}

ColumnVector ColumnVector::bool_column(std::vector<uint8_t> values, std::vector<bool> validity) {
  ColumnVector v(ColumnType::Bool);
  v.validity_ = full_validity(values, std::move(validity));
  zero_nulls(values, v.validity_);
  for (uint8_t& b : values) b = b ? 1 : 0;
  v.values_ = std::move(values);
  return v;
}

template <typename T>
std::vector<T>& ColumnVector::storage() {
  auto* p = std::get_if<std::vector<T>>(&values_);
  if (!p) throw SchemaError("column value type mismatch");
  return *p;
}

template <typename T>
const std::vector<T>& ColumnVector::storage() const {
  const auto* p = std::get_if<std::vector<T>>(&values_);
  if (!p) throw SchemaError("column value type mismatch");
  return *p;
}

const std::vector<int64_t>& ColumnVector::int64s() const { return storage<int64_t>(); }
const std::vector<double>& ColumnVector::doubles() const { return storage<double>(); }
const std::vector<std::string>& ColumnVector::strings() const { return storage<std::string>(); }
const std::vector<uint8_t>& ColumnVector::bools() const { return storage<uint8_t>(); }

void ColumnVector::append_int64(int64_t v) {
  if (type_ != ColumnType::Int64 && type_ != ColumnType::Date) {
    throw SchemaError("append_int64 on non-integer column");
  }
  storage<int64_t>().push_back(v);
  validity_.push_back(true);
}

void ColumnVector::append_double(double v) {
  if (type_ != ColumnType::Double) throw SchemaError("append_double on non-double column");
  storage<double>().push_back(v);
  validity_.push_back(true);
}

void ColumnVector::append_string(std::string v) {
  if (type_ != ColumnType::String) throw SchemaError("append_string on non-string column");
  storage<std::string>().push_back(std::move(v));
  validity_.push_back(true);
}

void ColumnVector::append_bool(bool v) {
  if (type_ != ColumnType::Bool) throw SchemaError("append_bool on non-bool column");
  storage<uint8_t>().push_back(v ? 1 : 0);
  validity_.push_back(true);
}

void ColumnVector::append_null() {
  switch (type_) {
    case ColumnType::Int64:
    case ColumnType::Date: storage<int64_t>().push_back(0); break;
    case ColumnType::Double: storage<double>().push_back(0.0); break;
    case ColumnType::String: storage<std::string>().emplace_back(); break;
    case ColumnType::Bool: storage<uint8_t>().push_back(0); break;
  }
  validity_.push_back(false);
}

void TableSchema::validate() const {
  if (columns.empty()) throw SchemaError("schema needs at least one column");
  std::unordered_set<std::string_view> seen;
  for (const auto& col : columns) {
    if (col.name.empty()) throw SchemaError("empty column name");
    if (col.name.size() > 255) throw SchemaError("column name longer than 255 bytes");
    if (!utf8_valid(col.name)) throw SchemaError("column name is not valid UTF-8");
    if (!seen.insert(col.name).second) throw SchemaError("duplicate column name: " + col.name);
  }
}

uint16_t TableSchema::ordinal_of(std::string_view name) const {
  for (size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return static_cast<uint16_t>(i);
  }
  throw ProjectionError("unknown column: " + std::string(name));
}

bool TableSchema::has_column(std::string_view name) const {
  for (const auto& col : columns) {
    if (col.name == name) return true;
  }
  return false;
}

}  // namespace ccf
