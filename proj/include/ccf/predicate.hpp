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

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "ccf/column.hpp"

namespace ccf {

/// Literal in a comparison.  DATE literals are int64 days since the epoch,
/// same as the storage type.
using Value = std::variant<int64_t, double, std::string, bool>;

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge, In };

/// Column vectors of the row group under evaluation, by column name.
using ColumnBinding = std::map<std::string, const ColumnVector*, std::less<>>;

class Predicate;
using PredicatePtr = std::shared_ptr<const Predicate>;

/// Immutable filter tree: comparisons against literals combined with
/// AND/OR/NOT.  A comparison over a NULL slot is false (for != too); NOT is
/// plain negation.
class Predicate {
 public:
  static PredicatePtr compare(std::string column, CompareOp op, Value literal);
  static PredicatePtr in_set(std::string column, std::vector<Value> set);
  static PredicatePtr logical_and(std::vector<PredicatePtr> children);
  static PredicatePtr logical_or(std::vector<PredicatePtr> children);
  static PredicatePtr logical_not(PredicatePtr child);

  /// Referenced columns exist and literals are comparable with the column
  /// type (int64 literals also compare against DOUBLE columns).  Throws
  /// ProjectionError for unknown columns, SchemaError for type mismatches.
  void validate(const TableSchema& schema) const;

  /// Unique referenced column names, in first-mention order.
  std::vector<std::string> referenced_columns() const;

  /// Row-level evaluation; the binding must cover referenced_columns().
  bool matches(const ColumnBinding& binding, size_t row) const;

 private:
  enum class Kind { Compare, And, Or, Not };

  Predicate() = default;

  void collect_columns(std::vector<std::string>& out) const;

  Kind kind_ = Kind::Compare;
  std::string column_;
  CompareOp op_ = CompareOp::Eq;
  std::vector<Value> literals_;  // 1 for comparisons, n for IN
  std::vector<PredicatePtr> children_;
};

}  // namespace ccf
