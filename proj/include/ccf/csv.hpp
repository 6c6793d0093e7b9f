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

#include <filesystem>
#include <string>
#include <vector>

#include "ccf/column.hpp"

namespace ccf::csv {

/// RFC-4180 quoting: fields containing comma, quote, CR or LF are quoted,
/// quotes doubled.  An empty string is emitted as "" so it stays
/// distinguishable from NULL (empty field).
std::string escape_field(std::string_view field);

/// Shortest round-trip decimal form (std::to_chars).
std::string format_double(double v);

/// Header row + data rows, CRLF line endings.  INT64/DATE as decimal,
/// DOUBLE via format_double, BOOL as true/false, NULL as empty field.
std::string to_csv(const Table& t);
void write_csv_file(const Table& t, const std::filesystem::path& path);

/// Raw rows of one CSV text (no header handling, no type conversion);
/// minimal parser for tests and oracle tooling.  Quoted fields are marked so
/// "" and an empty field stay distinct.
struct CsvField {
  std::string text;
  bool quoted = false;

  bool operator==(const CsvField&) const = default;
};
std::vector<std::vector<CsvField>> parse_rows(const std::string& text);

/// Inverse of to_csv for a known schema (header validated).
Table from_csv(const std::string& text, const TableSchema& schema);

}  // namespace ccf::csv
