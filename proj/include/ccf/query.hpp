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

#include <compare>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ccf/predicate.hpp"
#include "ccf/reader.hpp"
#include "ccf/writer.hpp"

namespace ccf {

using SourceList = std::vector<std::shared_ptr<RandomAccessSource>>;

struct ScanOptions {
  bool parallel = false;
};

/// Filtered, projected rows from one set of files sharing a schema.
struct ScanResult {
  TableSchema schema;                // projection columns, input table_name
  std::vector<RowGroup> row_groups;  // one per (file, row group), matching rows only
  uint64_t rows_scanned = 0;         // pre-filter row count

  Table to_table() const { return Table{schema, row_groups}; }
};

/// Reads (projection ∪ predicate columns) from every file — nothing else is
/// fetched or decrypted — and returns the projected columns of the rows the
/// predicate accepts.  A null predicate accepts everything.
ScanResult scan(const SourceList& files, const std::vector<std::string>& projection,
                const PredicatePtr& predicate, KeyResolver* resolver,
                const ScanOptions& opts = {});

/// Misuse query parameters: prescriptions of `drug` with none of the
/// excluded conditions observed inside the encounter window extended by
/// `window_extension_days` (endpoints inclusive).
struct MisuseQueryParams {
  std::string drug = "Amoxicillin";
  std::set<std::string> excluded_conditions = {"Acute bronchitis", "Otitis media",
                                               "Acute bacterial sinusitis", "Sinusitis"};
  int64_t window_extension_days = 2;
};

struct ResultRow {
  std::string patient_id;
  std::string encounter_id;
  int64_t encounter_start = 0;  // DATE
  std::string drug;

  auto operator<=>(const ResultRow&) const = default;
};

/// Query output: unique rows, sorted by (patient_id, encounter_id, drug).
struct ResultSet {
  std::vector<ResultRow> rows;

  static TableSchema result_schema();
  Table to_table() const;  // single row group
  static ResultSet from_table(const Table& t);

  bool operator==(const ResultSet&) const = default;
};

/// The representative anti-join over files (column-pruned scans).
ResultSet misuse_query(const SourceList& prescriptions_files, const SourceList& encounters_files,
                       const SourceList& conditions_files, const MisuseQueryParams& params,
                       KeyResolver* resolver);

/// Same query over already-materialized tables; the tables need only carry
/// the referenced columns.  Shared by the file path above and the bench
/// harness (which scans the full tables first, the way a distributed job
/// without pushdown would).
ResultSet misuse_query_tables(const Table& prescriptions, const Table& encounters,
                              const Table& conditions, const MisuseQueryParams& params);

FileFooter persist_result(const ResultSet& result, const std::optional<EncryptionConfig>& enc,
                          Bytes& sink);
FileFooter persist_result_file(const ResultSet& result, const std::optional<EncryptionConfig>& enc,
                               const std::filesystem::path& path);

}  // namespace ccf
