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

#include "ccf/footer.hpp"

#include <json.hpp>

#include "ccf/bytes.hpp"
#include "ccf/errors.hpp"

namespace ccf {

namespace {

using nlohmann::json;

const json& require(const json& obj, const char* field, json::value_t type) {
  const auto it = obj.find(field);
  if (it == obj.end()) throw DecodingError(std::string("footer: missing field ") + field);
  // Integer fields may arrive as unsigned or signed depending on magnitude.
  const bool numeric_ok = type == json::value_t::number_unsigned &&
                          (it->is_number_unsigned() || (it->is_number_integer() &&
                                                        it->get<int64_t>() >= 0));
  if (it->type() != type && !numeric_ok) {
    throw DecodingError(std::string("footer: field ") + field + " has wrong type");
  }
  return *it;
}

json chunk_to_json(const ColumnChunkMeta& c) {
  json j{{"column", c.column_name}, {"ordinal", c.ordinal},     {"row_group", c.row_group},
         {"offset", c.offset},      {"length", c.length},       {"encrypted", c.encrypted}};
  if (c.key_material) j["key_material"] = encode_key_material(*c.key_material);
  return j;
}

ColumnChunkMeta chunk_from_json(const json& j) {
  if (!j.is_object()) throw DecodingError("footer: chunk meta is not an object");
  ColumnChunkMeta c;
  c.column_name = require(j, "column", json::value_t::string).get<std::string>();
  const uint64_t ordinal = require(j, "ordinal", json::value_t::number_unsigned).get<uint64_t>();
  const uint64_t rg = require(j, "row_group", json::value_t::number_unsigned).get<uint64_t>();
  if (ordinal > 0xFFFE || rg > 0xFFFE) throw DecodingError("footer: chunk index out of range");
  c.ordinal = static_cast<uint16_t>(ordinal);
  c.row_group = static_cast<uint16_t>(rg);
  c.offset = require(j, "offset", json::value_t::number_unsigned).get<uint64_t>();
  c.length = require(j, "length", json::value_t::number_unsigned).get<uint64_t>();
  c.encrypted = require(j, "encrypted", json::value_t::boolean).get<bool>();
  if (const auto it = j.find("key_material"); it != j.end()) {
    if (!it->is_string()) throw DecodingError("footer: key_material must be a string");
    c.key_material = decode_key_material(it->get<std::string>());
  }
  if (c.encrypted != c.key_material.has_value()) {
    throw DecodingError("footer: encrypted flag and key_material presence disagree");
  }
  return c;
}

}  // namespace

std::string encode_footer(const FileFooter& footer) {
  json schema{{"table_name", footer.schema.table_name}, {"columns", json::array()}};
  for (const ColumnSpec& col : footer.schema.columns) {
    schema["columns"].push_back({{"name", col.name},
                                 {"type", std::string(column_type_name(col.type))},
                                 {"nullable", col.nullable}});
  }
  json row_groups = json::array();
  for (const RowGroupMeta& rg : footer.row_groups) {
    json chunks = json::array();
    for (const ColumnChunkMeta& c : rg.chunks) chunks.push_back(chunk_to_json(c));
    row_groups.push_back({{"num_rows", rg.num_rows}, {"chunks", std::move(chunks)}});
  }
  const json j{{"file_id", base64_encode(footer.file_id)},
               {"schema", std::move(schema)},
               {"row_groups", std::move(row_groups)},
               {"created_by", footer.created_by}};
  return j.dump();
}

FileFooter decode_footer(const std::string& json_text) {
  json j = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) throw DecodingError("footer: invalid JSON");

  FileFooter footer;
  const auto file_id = base64_decode(require(j, "file_id", json::value_t::string).get<std::string>());
  if (!file_id || file_id->size() != footer.file_id.size()) {
    throw DecodingError("footer: file_id must be base64 of 16 bytes");
  }
  std::copy(file_id->begin(), file_id->end(), footer.file_id.begin());
  footer.created_by = require(j, "created_by", json::value_t::string).get<std::string>();

  const json& schema = require(j, "schema", json::value_t::object);
  footer.schema.table_name = require(schema, "table_name", json::value_t::string).get<std::string>();
  for (const json& col : require(schema, "columns", json::value_t::array)) {
    if (!col.is_object()) throw DecodingError("footer: column spec is not an object");
    ColumnSpec spec;
    spec.name = require(col, "name", json::value_t::string).get<std::string>();
    try {
      spec.type = column_type_from_name(require(col, "type", json::value_t::string).get<std::string>());
    } catch (const SchemaError& e) {
      throw DecodingError(std::string("footer: ") + e.what());
    }
    spec.nullable = require(col, "nullable", json::value_t::boolean).get<bool>();
    footer.schema.columns.push_back(std::move(spec));
  }
  try {
    footer.schema.validate();
  } catch (const SchemaError& e) {
    throw DecodingError(std::string("footer: ") + e.what());
  }

  uint16_t rg_index = 0;
  for (const json& rg : require(j, "row_groups", json::value_t::array)) {
    if (!rg.is_object()) throw DecodingError("footer: row group is not an object");
    RowGroupMeta meta;
    meta.num_rows = require(rg, "num_rows", json::value_t::number_unsigned).get<uint64_t>();
    for (const json& c : require(rg, "chunks", json::value_t::array)) {
      meta.chunks.push_back(chunk_from_json(c));
    }
    if (meta.chunks.size() != footer.schema.columns.size()) {
      throw DecodingError("footer: chunk list does not cover the schema");
    }
    for (size_t i = 0; i < meta.chunks.size(); ++i) {
      const ColumnChunkMeta& c = meta.chunks[i];
      if (c.column_name != footer.schema.columns[i].name || c.ordinal != i ||
          c.row_group != rg_index) {
        throw DecodingError("footer: chunk order does not match the schema");
      }
    }
    footer.row_groups.push_back(std::move(meta));
    ++rg_index;
  }
  return footer;
}

}  // namespace ccf
