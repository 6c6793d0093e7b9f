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

#include "ccf/csv.hpp"

#include <charconv>
#include <fstream>

#include "ccf/errors.hpp"

namespace ccf::csv {

std::string escape_field(std::string_view field) {
  if (field.empty()) return "\"\"";
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw EncodingError("cannot format double");
  return std::string(buf, end);
}

std::string to_csv(const Table& t) {
  std::string out;
  for (size_t i = 0; i < t.schema.columns.size(); ++i) {
    if (i) out += ',';
    out += escape_field(t.schema.columns[i].name);
  }
  out += "\r\n";
  for (const RowGroup& rg : t.row_groups) {
    const size_t rows = rg.empty() ? 0 : rg[0].size();
    for (size_t row = 0; row < rows; ++row) {
      for (size_t col = 0; col < rg.size(); ++col) {
        if (col) out += ',';
        const ColumnVector& v = rg[col];
        if (v.is_null(row)) continue;  // NULL = empty field
        switch (v.type()) {
          case ColumnType::Int64:
          case ColumnType::Date: out += std::to_string(v.int64_at(row)); break;
          case ColumnType::Double: out += format_double(v.double_at(row)); break;
          case ColumnType::String: out += escape_field(v.string_at(row)); break;
          case ColumnType::Bool: out += v.bool_at(row) ? "true" : "false"; break;
        }
      }
      out += "\r\n";
    }
  }
  return out;
}

void write_csv_file(const Table& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  const std::string text = to_csv(t);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("short write to " + path.string());
}

std::vector<std::vector<CsvField>> parse_rows(const std::string& text) {
  std::vector<std::vector<CsvField>> rows;
  std::vector<CsvField> row;
  CsvField field;
  size_t i = 0;
  const size_t n = text.size();
  bool in_row = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field = CsvField{};
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
    in_row = false;
  };

  while (i < n) {
    in_row = true;
    if (text[i] == '"') {
      field.quoted = true;
      ++i;
      while (true) {
        if (i >= n) throw DecodingError("csv: unterminated quoted field");
        if (text[i] == '"') {
          if (i + 1 < n && text[i + 1] == '"') {
            field.text += '"';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        field.text += text[i++];
      }
    } else {
      while (i < n && text[i] != ',' && text[i] != '\r' && text[i] != '\n') {
        field.text += text[i++];
      }
    }
    if (i >= n) {
      end_row();
      break;
    }
    if (text[i] == ',') {
      end_field();
      ++i;
      continue;
    }
    if (text[i] == '\r' && i + 1 < n && text[i + 1] == '\n') {
      end_row();
      i += 2;
      continue;
    }
    if (text[i] == '\n' || text[i] == '\r') {
      end_row();
      ++i;
      continue;
    }
    throw DecodingError("csv: stray character after quoted field");
  }
  if (in_row) end_row();
  return rows;
}

Table from_csv(const std::string& text, const TableSchema& schema) {
  const auto rows = parse_rows(text);
  if (rows.empty()) throw DecodingError("csv: missing header");
  if (rows[0].size() != schema.columns.size()) throw DecodingError("csv: header width mismatch");
  for (size_t i = 0; i < schema.columns.size(); ++i) {
    if (rows[0][i].text != schema.columns[i].name) {
      throw DecodingError("csv: header mismatch at column " + std::to_string(i));
    }
  }

  Table out{schema, {RowGroup{}}};
  for (const ColumnSpec& c : schema.columns) out.row_groups[0].emplace_back(ColumnVector(c.type));

  for (size_t r = 1; r < rows.size(); ++r) {
    const std::vector<CsvField>& row = rows[r];
    if (row.size() != schema.columns.size()) {
      throw DecodingError("csv: row " + std::to_string(r) + " width mismatch");
    }
    for (size_t c = 0; c < row.size(); ++c) {
      ColumnVector& col = out.row_groups[0][c];
      const CsvField& f = row[c];
      if (f.text.empty() && !f.quoted) {
        if (!schema.columns[c].nullable) {
          throw DecodingError("csv: null in non-nullable column " + schema.columns[c].name);
        }
        col.append_null();
        continue;
      }
      switch (schema.columns[c].type) {
        case ColumnType::Int64:
        case ColumnType::Date: {
          int64_t v = 0;
          const auto [p, ec] = std::from_chars(f.text.data(), f.text.data() + f.text.size(), v);
          if (ec != std::errc{} || p != f.text.data() + f.text.size()) {
            throw DecodingError("csv: bad integer '" + f.text + "'");
          }
          col.append_int64(v);
          break;
        }
        case ColumnType::Double: {
          double v = 0;
          const auto [p, ec] = std::from_chars(f.text.data(), f.text.data() + f.text.size(), v);
          if (ec != std::errc{} || p != f.text.data() + f.text.size()) {
            throw DecodingError("csv: bad double '" + f.text + "'");
          }
          col.append_double(v);
          break;
        }
        case ColumnType::String: col.append_string(f.text); break;
        case ColumnType::Bool:
          if (f.text == "true") {
            col.append_bool(true);
          } else if (f.text == "false") {
            col.append_bool(false);
          } else {
            throw DecodingError("csv: bad bool '" + f.text + "'");
          }
          break;
      }
    }
  }
  return out;
}

}  // namespace ccf::csv
