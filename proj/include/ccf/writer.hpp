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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ccf/column.hpp"
#include "ccf/footer.hpp"
#include "ccf/keytools.hpp"
#include "ccf/kms.hpp"

namespace ccf {

/// How to encrypt a file: which columns are protected by which master key,
/// plus the footer's master key.  Columns absent from `column_keys` are
/// written in the clear (inside a "CCFE" file the footer is always
/// encrypted).
struct EncryptionConfig {
  std::string footer_key_id;
  std::map<std::string, std::string> column_keys;  // column name -> master key id
  WrapMode mode = WrapMode::Double;
  std::shared_ptr<KmsClient> kms;
  std::shared_ptr<KekCache> cache;
};

struct WriteOptions {
  /// Fixed file id instead of a random one; lets generators produce
  /// byte-identical plaintext files across reruns.
  std::optional<crypto::FileId> file_id;
  /// Run the encode(+encrypt) kernel across chunks with OpenMP.
  bool parallel = false;
  std::string created_by = "ccf/0.1.0";
};

/// Serializes the table into `sink` (replacing its contents) and returns the
/// footer as written.  Ragged row groups throw SchemaError; KMS failures
/// propagate.
FileFooter write_table(const TableSchema& schema, const std::vector<RowGroup>& row_groups,
                       const std::optional<EncryptionConfig>& enc, Bytes& sink,
                       const WriteOptions& opts = {});

/// write_table into `path` via a temp file + rename, so a failed write never
/// leaves a partial file behind.
FileFooter write_table_file(const TableSchema& schema, const std::vector<RowGroup>& row_groups,
                            const std::optional<EncryptionConfig>& enc,
                            const std::filesystem::path& path, const WriteOptions& opts = {});

}  // namespace ccf
