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

#include "ccf/predicate.hpp"

#include <algorithm>

#include "ccf/errors.hpp"

namespace ccf {

namespace {

bool literal_comparable(ColumnType type, const Value& literal) {
  switch (type) {
    case ColumnType::Int64:
    case ColumnType::Date:
      return std::holds_alternative<int64_t>(literal);
    case ColumnType::Double:
      return std::holds_alternative<double>(literal) || std::holds_alternative<int64_t>(literal);
    case ColumnType::String:
      return std::holds_alternative<std::string>(literal);
    case ColumnType::Bool:
      return std::holds_alternative<bool>(literal);
  }
  return false;
}

template <typename T>
bool apply_op(CompareOp op, const T& lhs, const T& rhs) {
  switch (op) {
    case CompareOp::Eq: return lhs == rhs;
    case CompareOp::Ne: return lhs != rhs;
    case CompareOp::Lt: return lhs < rhs;
    case CompareOp::Le: return lhs <= rhs;
    case CompareOp::Gt: return lhs > rhs;
    case CompareOp::Ge: return lhs >= rhs;
    case CompareOp::In: return lhs == rhs;  // one element of the set
  }
  return false;
}

bool compare_value(const ColumnVector& col, size_t row, CompareOp op, const Value& literal) {
  switch (col.type()) {
    case ColumnType::Int64:
    case ColumnType::Date:
      return apply_op(op, col.int64_at(row), std::get<int64_t>(literal));
    case ColumnType::Double: {
      const double rhs = std::holds_alternative<double>(literal)
                             ? std::get<double>(literal)
                             : static_cast<double>(std::get<int64_t>(literal));
      return apply_op(op, col.double_at(row), rhs);
    }
    case ColumnType::String:
      return apply_op(op, col.string_at(row), std::get<std::string>(literal));
    case ColumnType::Bool:
      return apply_op(op, col.bool_at(row), std::get<bool>(literal));
  }
  return false;
}

}  // namespace

PredicatePtr Predicate::compare(std::string column, CompareOp op, Value literal) {
  if (op == CompareOp::In) throw SchemaError("use Predicate::in_set for IN");
  auto p = std::shared_ptr<Predicate>(new Predicate());
  p->kind_ = Kind::Compare;
  p->column_ = std::move(column);
  p->op_ = op;
  p->literals_.push_back(std::move(literal));
  return p;
}

PredicatePtr Predicate::in_set(std::string column, std::vector<Value> set) {
  auto p = std::shared_ptr<Predicate>(new Predicate());
  p->kind_ = Kind::Compare;
  p->column_ = std::move(column);
  p->op_ = CompareOp::In;
  p->literals_ = std::move(set);
  return p;
}

PredicatePtr Predicate::logical_and(std::vector<PredicatePtr> children) {
  auto p = std::shared_ptr<Predicate>(new Predicate());
  p->kind_ = Kind::And;
  p->children_ = std::move(children);
  return p;
}

PredicatePtr Predicate::logical_or(std::vector<PredicatePtr> children) {
  auto p = std::shared_ptr<Predicate>(new Predicate());
  p->kind_ = Kind::Or;
  p->children_ = std::move(children);
  return p;
}

PredicatePtr Predicate::logical_not(PredicatePtr child) {
  if (!child) throw SchemaError("NOT needs a child predicate");
  auto p = std::shared_ptr<Predicate>(new Predicate());
  p->kind_ = Kind::Not;
  p->children_.push_back(std::move(child));
  return p;
}

void Predicate::validate(const TableSchema& schema) const {
  if (kind_ != Kind::Compare) {
    for (const PredicatePtr& c : children_) c->validate(schema);
    return;
  }
  const ColumnSpec& spec = schema.columns.at(schema.ordinal_of(column_));
  for (const Value& literal : literals_) {
    if (!literal_comparable(spec.type, literal)) {
      throw SchemaError("predicate literal not comparable with column '" + column_ + "'");
    }
  }
}

void Predicate::collect_columns(std::vector<std::string>& out) const {
  if (kind_ == Kind::Compare) {
    if (std::find(out.begin(), out.end(), column_) == out.end()) out.push_back(column_);
    return;
  }
  for (const PredicatePtr& c : children_) c->collect_columns(out);
}

std::vector<std::string> Predicate::referenced_columns() const {
  std::vector<std::string> out;
  collect_columns(out);
  return out;
}

bool Predicate::matches(const ColumnBinding& binding, size_t row) const {
  switch (kind_) {
    case Kind::Compare: {
      const auto it = binding.find(column_);
      if (it == binding.end()) throw ProjectionError("predicate column '" + column_ + "' not bound");
      const ColumnVector& col = *it->second;
      if (col.is_null(row)) return false;
      if (op_ == CompareOp::In) {
        return std::any_of(literals_.begin(), literals_.end(), [&](const Value& v) {
          return compare_value(col, row, CompareOp::In, v);
        });
      }
      return compare_value(col, row, op_, literals_.front());
    }
    case Kind::And:
      return std::all_of(children_.begin(), children_.end(),
                         [&](const PredicatePtr& c) { return c->matches(binding, row); });
    case Kind::Or:
      return std::any_of(children_.begin(), children_.end(),
                         [&](const PredicatePtr& c) { return c->matches(binding, row); });
    case Kind::Not:
      return !children_.front()->matches(binding, row);
  }
  return false;
}

}  // namespace ccf
