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
#include <optional>
#include <string>
#include <vector>

#include "ccf/column.hpp"
#include "ccf/crypto.hpp"
#include "ccf/key_material.hpp"

namespace ccf {

inline constexpr char kMagicPlain[4] = {'C', 'C', 'F', '1'};
inline constexpr char kMagicEncrypted[4] = {'C', 'C', 'F', 'E'};

/// Location and key record of one column chunk.  Offsets are absolute from
/// the start of the file.
struct ColumnChunkMeta {
  std::string column_name;
  uint16_t ordinal = 0;
  uint16_t row_group = 0;
  uint64_t offset = 0;
  uint64_t length = 0;
  bool encrypted = false;
  std::optional<KeyMaterial> key_material;

  bool operator==(const ColumnChunkMeta&) const = default;
};

struct RowGroupMeta {
  uint64_t num_rows = 0;
  std::vector<ColumnChunkMeta> chunks;  // schema order, one per column

  bool operator==(const RowGroupMeta&) const = default;
};

struct FileFooter {
  crypto::FileId file_id{};
  TableSchema schema;
  std::vector<RowGroupMeta> row_groups;
  std::string created_by;

  bool operator==(const FileFooter&) const = default;
};

/// Footer JSON.  Field names: "file_id" (base64), "schema", "row_groups",
/// "created_by"; chunk meta: "column", "ordinal", "row_group", "offset",
/// "length", "encrypted", "key_material" (serialized KeyMaterial JSON
/// string, present iff encrypted).
std::string encode_footer(const FileFooter& footer);

/// Strict inverse.  Structural violations (bad field types, chunks not
/// covering the schema in order, encrypted/key_material mismatch) throw
/// DecodingError; nested key material errors throw MalformedKeyMaterial.
FileFooter decode_footer(const std::string& json_text);

}  // namespace ccf
