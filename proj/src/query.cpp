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

#include "ccf/query.hpp"

#include <algorithm>
#include <unordered_map>

#include "ccf/errors.hpp"

namespace ccf {

namespace {

void append_value(ColumnVector& out, const ColumnVector& in, size_t row) {
  if (in.is_null(row)) {
    out.append_null();
    return;
  }
  switch (in.type()) {
    case ColumnType::Int64:
    case ColumnType::Date: out.append_int64(in.int64_at(row)); return;
    case ColumnType::Double: out.append_double(in.double_at(row)); return;
    case ColumnType::String: out.append_string(in.string_at(row)); return;
    case ColumnType::Bool: out.append_bool(in.bool_at(row)); return;
  }
}

struct EncounterWindow {
  int64_t start = 0;
  int64_t end = 0;
};

const ColumnVector& column_of(const Table& t, std::string_view name, size_t rg) {
  return t.row_groups[rg][t.schema.ordinal_of(name)];
}

std::string non_null_string(const ColumnVector& col, size_t row, const char* what) {
  if (col.is_null(row)) throw DataError(std::string("null ") + what);
  return col.string_at(row);
}

}  // namespace

ScanResult scan(const SourceList& files, const std::vector<std::string>& projection,
                const PredicatePtr& predicate, KeyResolver* resolver, const ScanOptions& opts) {
  if (files.empty()) throw DataError("no input files");

  // Read set: projection first, then predicate-only columns.
  std::vector<std::string> read_set = projection;
  if (predicate) {
    for (std::string& col : predicate->referenced_columns()) {
      if (std::find(read_set.begin(), read_set.end(), col) == read_set.end()) {
        read_set.push_back(std::move(col));
      }
    }
  }

  ScanResult result;
  std::optional<TableSchema> file_schema;
  for (const std::shared_ptr<RandomAccessSource>& file : files) {
    const FileFooter footer = read_footer(*file, resolver);
    if (!file_schema) {
      file_schema = footer.schema;
      result.schema.table_name = footer.schema.table_name;
      for (const std::string& name : projection) {
        result.schema.columns.push_back(footer.schema.columns.at(footer.schema.ordinal_of(name)));
      }
      if (predicate) predicate->validate(footer.schema);
      for (const std::string& name : read_set) footer.schema.ordinal_of(name);  // ProjectionError
    } else if (!(footer.schema == *file_schema)) {
      throw SchemaError("input files do not share a schema");
    }

    const std::vector<ProjectedRowGroup> groups =
        read_columns(*file, footer, read_set, resolver, ReadOptions{opts.parallel});
    for (const ProjectedRowGroup& g : groups) {
      result.rows_scanned += g.num_rows;
      ColumnBinding binding;
      for (size_t i = 0; i < read_set.size(); ++i) binding[read_set[i]] = &g.columns[i];

      RowGroup out;
      for (size_t i = 0; i < projection.size(); ++i) {
        out.emplace_back(ColumnVector(result.schema.columns[i].type));
      }
      for (size_t row = 0; row < g.num_rows; ++row) {
        if (predicate && !predicate->matches(binding, row)) continue;
        for (size_t i = 0; i < projection.size(); ++i) append_value(out[i], g.columns[i], row);
      }
      result.row_groups.push_back(std::move(out));
    }
  }
  return result;
}

TableSchema ResultSet::result_schema() {
  return TableSchema{"misuse_result",
                     {{"patient_id", ColumnType::String, false},
                      {"encounter_id", ColumnType::String, false},
                      {"encounter_start", ColumnType::Date, false},
                      {"drug", ColumnType::String, false}}};
}

Table ResultSet::to_table() const {
  RowGroup rg{ColumnVector(ColumnType::String), ColumnVector(ColumnType::String),
              ColumnVector(ColumnType::Date), ColumnVector(ColumnType::String)};
  for (const ResultRow& row : rows) {
    rg[0].append_string(row.patient_id);
    rg[1].append_string(row.encounter_id);
    rg[2].append_int64(row.encounter_start);
    rg[3].append_string(row.drug);
  }
  return Table{result_schema(), {std::move(rg)}};
}

ResultSet ResultSet::from_table(const Table& t) {
  ResultSet out;
  for (size_t rg = 0; rg < t.row_groups.size(); ++rg) {
    const ColumnVector& pid = column_of(t, "patient_id", rg);
    const ColumnVector& eid = column_of(t, "encounter_id", rg);
    const ColumnVector& start = column_of(t, "encounter_start", rg);
    const ColumnVector& drug = column_of(t, "drug", rg);
    for (size_t row = 0; row < pid.size(); ++row) {
      out.rows.push_back(ResultRow{pid.string_at(row), eid.string_at(row), start.int64_at(row),
                                   drug.string_at(row)});
    }
  }
  std::sort(out.rows.begin(), out.rows.end());
  out.rows.erase(std::unique(out.rows.begin(), out.rows.end()), out.rows.end());
  return out;
}

ResultSet misuse_query_tables(const Table& prescriptions, const Table& encounters,
                              const Table& conditions, const MisuseQueryParams& params) {
  if (params.drug.empty()) throw DataError("misuse query: drug must be nonempty");
  if (params.window_extension_days < 0) throw DataError("misuse query: negative window");

  // encounter_id -> date window
  std::unordered_map<std::string, EncounterWindow> windows;
  for (size_t rg = 0; rg < encounters.row_groups.size(); ++rg) {
    const ColumnVector& eid = column_of(encounters, "encounter_id", rg);
    const ColumnVector& start = column_of(encounters, "start_date", rg);
    const ColumnVector& end = column_of(encounters, "end_date", rg);
    for (size_t row = 0; row < eid.size(); ++row) {
      if (start.is_null(row) || end.is_null(row)) throw DataError("null encounter dates");
      windows[non_null_string(eid, row, "encounter_id")] =
          EncounterWindow{start.int64_at(row), end.int64_at(row)};
    }
  }

  // patient_id -> onset dates of excluded conditions
  std::unordered_map<std::string, std::vector<int64_t>> excluded_onsets;
  for (size_t rg = 0; rg < conditions.row_groups.size(); ++rg) {
    const ColumnVector& pid = column_of(conditions, "patient_id", rg);
    const ColumnVector& onset = column_of(conditions, "onset_date", rg);
    const ColumnVector& desc = column_of(conditions, "description", rg);
    for (size_t row = 0; row < pid.size(); ++row) {
      if (desc.is_null(row) || !params.excluded_conditions.count(desc.string_at(row))) continue;
      if (onset.is_null(row)) throw DataError("null condition onset_date");
      excluded_onsets[non_null_string(pid, row, "patient_id")].push_back(onset.int64_at(row));
    }
  }

  ResultSet out;
  for (size_t rg = 0; rg < prescriptions.row_groups.size(); ++rg) {
    const ColumnVector& pid = column_of(prescriptions, "patient_id", rg);
    const ColumnVector& eid = column_of(prescriptions, "encounter_id", rg);
    const ColumnVector& drug = column_of(prescriptions, "drug", rg);
    for (size_t row = 0; row < pid.size(); ++row) {
      if (drug.is_null(row) || drug.string_at(row) != params.drug) continue;
      const std::string encounter_id = non_null_string(eid, row, "encounter_id");
      const auto it = windows.find(encounter_id);
      if (it == windows.end()) {
        throw DataError("prescription references unknown encounter " + encounter_id);
      }
      const EncounterWindow w = it->second;
      const int64_t window_end = w.end + params.window_extension_days;

      const std::string patient_id = non_null_string(pid, row, "patient_id");
      bool symptom_seen = false;
      if (const auto onsets = excluded_onsets.find(patient_id); onsets != excluded_onsets.end()) {
        symptom_seen = std::any_of(onsets->second.begin(), onsets->second.end(), [&](int64_t d) {
          return d >= w.start && d <= window_end;
        });
      }
      if (!symptom_seen) {
        out.rows.push_back(ResultRow{patient_id, encounter_id, w.start, drug.string_at(row)});
      }
    }
  }
  std::sort(out.rows.begin(), out.rows.end());
  out.rows.erase(std::unique(out.rows.begin(), out.rows.end()), out.rows.end());
  return out;
}

ResultSet misuse_query(const SourceList& prescriptions_files, const SourceList& encounters_files,
                       const SourceList& conditions_files, const MisuseQueryParams& params,
                       KeyResolver* resolver) {
  if (params.drug.empty()) throw DataError("misuse query: drug must be nonempty");

  // Column-pruned scans: only what the join needs is read or decrypted, and
  // the drug filter is pushed into the prescriptions scan.
  const ScanResult prescriptions =
      scan(prescriptions_files, {"patient_id", "encounter_id", "drug"},
           Predicate::compare("drug", CompareOp::Eq, Value{params.drug}), resolver);
  const ScanResult encounters =
      scan(encounters_files, {"encounter_id", "start_date", "end_date"}, nullptr, resolver);
  const ScanResult conditions =
      scan(conditions_files, {"patient_id", "onset_date", "description"}, nullptr, resolver);

  return misuse_query_tables(prescriptions.to_table(), encounters.to_table(),
                             conditions.to_table(), params);
}

FileFooter persist_result(const ResultSet& result, const std::optional<EncryptionConfig>& enc,
                          Bytes& sink) {
  const Table t = result.to_table();
  return write_table(t.schema, t.row_groups, enc, sink);
}

FileFooter persist_result_file(const ResultSet& result, const std::optional<EncryptionConfig>& enc,
                               const std::filesystem::path& path) {
  const Table t = result.to_table();
  return write_table_file(t.schema, t.row_groups, enc, path);
}

}  // namespace ccf
