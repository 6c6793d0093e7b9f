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

#include "ccf/writer.hpp"

#include <fstream>
#include <random>

#include "ccf/chunk_kernels.hpp"
#include "ccf/errors.hpp"

namespace ccf {

namespace {

void validate_input(const TableSchema& schema, const std::vector<RowGroup>& row_groups,
                    const std::optional<EncryptionConfig>& enc) {
  schema.validate();
  for (const RowGroup& rg : row_groups) {
    if (rg.size() != schema.columns.size()) {
      throw SchemaError("row group has " + std::to_string(rg.size()) + " columns, schema has " +
                        std::to_string(schema.columns.size()));
    }
    for (size_t i = 0; i < rg.size(); ++i) {
      if (rg[i].type() != schema.columns[i].type) {
        throw SchemaError("column '" + schema.columns[i].name + "' has the wrong type");
      }
      if (rg[i].size() != rg[0].size()) {
        throw SchemaError("ragged row group: column '" + schema.columns[i].name + "'");
      }
      if (!schema.columns[i].nullable) {
        for (size_t row = 0; row < rg[i].size(); ++row) {
          if (rg[i].is_null(row)) {
            throw SchemaError("null in non-nullable column '" + schema.columns[i].name + "'");
          }
        }
      }
    }
  }
  if (row_groups.size() > 0xFFFE) throw SchemaError("too many row groups");
  if (!enc) return;
  if (!enc->kms || !enc->cache) throw SchemaError("encryption config needs a KMS client and cache");
  if (enc->footer_key_id.empty()) throw SchemaError("encryption config needs a footer key id");
  for (const auto& [column, key_id] : enc->column_keys) {
    if (!schema.has_column(column)) {
      throw SchemaError("encryption config names unknown column '" + column + "'");
    }
    if (key_id.empty()) throw SchemaError("empty master key id for column '" + column + "'");
  }
}

void append_magic(Bytes& out, const char (&magic)[4]) {
  out.insert(out.end(), magic, magic + 4);
}

}  // namespace

FileFooter write_table(const TableSchema& schema, const std::vector<RowGroup>& row_groups,
                       const std::optional<EncryptionConfig>& enc, Bytes& sink,
                       const WriteOptions& opts) {
  validate_input(schema, row_groups, enc);

  FileFooter footer;
  if (opts.file_id) {
    footer.file_id = *opts.file_id;
  } else {
    const Bytes random = crypto::random_bytes(footer.file_id.size());
    std::copy(random.begin(), random.end(), footer.file_id.begin());
  }
  footer.schema = schema;
  footer.created_by = opts.created_by;

  // Key resolution first, serially: one KMS round per DEK in single wrapping,
  // one per master key per TTL window in double wrapping.  The CPU-heavy
  // encode+encrypt runs afterwards as a kernel over ready-keyed items.
  std::vector<ChunkEncodeItem> items;
  for (uint16_t rg = 0; rg < row_groups.size(); ++rg) {
    RowGroupMeta rg_meta;
    rg_meta.num_rows = row_groups[rg].empty() ? 0 : row_groups[rg][0].size();
    for (uint16_t ord = 0; ord < schema.columns.size(); ++ord) {
      ColumnChunkMeta meta;
      meta.column_name = schema.columns[ord].name;
      meta.ordinal = ord;
      meta.row_group = rg;

      ChunkEncodeItem item;
      item.vector = &row_groups[rg][ord];
      const std::string* key_id = nullptr;
      if (enc) {
        if (const auto it = enc->column_keys.find(meta.column_name); it != enc->column_keys.end()) {
          key_id = &it->second;
        }
      }
      if (key_id) {
        DekWithMaterial dek =
            create_dek_for_write(*key_id, /*is_footer=*/false, enc->mode, *enc->kms, *enc->cache);
        meta.encrypted = true;
        meta.key_material = std::move(dek.material);
        item.encrypted = true;
        item.dek = std::move(dek.dek);
        item.aad = crypto::ModuleAad::for_chunk(footer.file_id, rg, ord);
      }
      items.push_back(std::move(item));
      rg_meta.chunks.push_back(std::move(meta));
    }
    footer.row_groups.push_back(std::move(rg_meta));
  }

  const std::vector<Bytes> blobs =
      opts.parallel ? encode_encrypt_parallel(items) : encode_encrypt_serial(items);

  sink.clear();
  append_magic(sink, enc ? kMagicEncrypted : kMagicPlain);
  size_t blob_index = 0;
  for (RowGroupMeta& rg_meta : footer.row_groups) {
    for (ColumnChunkMeta& meta : rg_meta.chunks) {
      const Bytes& blob = blobs[blob_index++];
      meta.offset = sink.size();
      meta.length = blob.size();
      sink.insert(sink.end(), blob.begin(), blob.end());
    }
  }

  const std::string footer_json = encode_footer(footer);
  if (!enc) {
    sink.insert(sink.end(), footer_json.begin(), footer_json.end());
    put_u32_le(sink, static_cast<uint32_t>(footer_json.size()));
    append_magic(sink, kMagicPlain);
    return footer;
  }

  DekWithMaterial footer_dek =
      create_dek_for_write(enc->footer_key_id, /*is_footer=*/true, enc->mode, *enc->kms,
                           *enc->cache);
  const Bytes footer_blob =
      crypto::encrypt_module(footer_dek.dek, to_bytes(footer_json), crypto::ModuleAad::for_footer())
          .serialize();
  const std::string km_json = encode_key_material(footer_dek.material);

  sink.insert(sink.end(), km_json.begin(), km_json.end());
  sink.insert(sink.end(), footer_blob.begin(), footer_blob.end());
  put_u32_le(sink, static_cast<uint32_t>(km_json.size()));
  put_u32_le(sink, static_cast<uint32_t>(footer_blob.size()));
  append_magic(sink, kMagicEncrypted);
  return footer;
}

FileFooter write_table_file(const TableSchema& schema, const std::vector<RowGroup>& row_groups,
                            const std::optional<EncryptionConfig>& enc,
                            const std::filesystem::path& path, const WriteOptions& opts) {
  Bytes sink;
  FileFooter footer = write_table(schema, row_groups, enc, sink, opts);

  std::random_device rd;
  const std::filesystem::path tmp =
      path.parent_path() / (path.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(sink.data()), static_cast<std::streamsize>(sink.size()));
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw Error("short write to " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot move " + tmp.string() + " into place: " + ec.message());
  }
  return footer;
}

}  // namespace ccf
