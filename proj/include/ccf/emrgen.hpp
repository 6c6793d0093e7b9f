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
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ccf/column.hpp"
#include "ccf/writer.hpp"

namespace ccf::emr {

struct GenConfig {
  uint32_t patients = 0;
  uint64_t seed = 0;
  /// Condition name -> draw-weight multiplier (default 1.0); must name
  /// catalog conditions with positive weights.
  std::map<std::string, double> bias;
  std::optional<uint32_t> batch_days;
};

/// The four generated tables, each as one row group.
struct EmrTables {
  Table patients;
  Table encounters;
  Table conditions;
  Table prescriptions;

  const Table& table(std::string_view name) const;  // throws SchemaError

  bool operator==(const EmrTables&) const = default;
};

struct ConditionEntry {
  std::string_view name;
  double base_weight;
};

/// Fixed condition catalog; the four default exclusion targets carry
/// elevated base weights.
std::span<const ConditionEntry> condition_catalog();
std::span<const ConditionEntry> drug_catalog();

std::span<const std::string_view> table_names();  // generation order
TableSchema table_schema(std::string_view name);  // throws SchemaError

/// Fixed per-table sensitive column set (ids, descriptions, drug).
std::span<const std::string_view> sensitive_columns(std::string_view table_name);

/// Conventional master-key ids: <table>.sensitive / <table>.other /
/// <table>.footer.
std::vector<std::string> master_key_ids(std::string_view table_name);

/// Encryption config covering every column of `schema`: sensitive columns
/// under <table>.sensitive, the rest under <table>.other, footer under
/// <table>.footer.
EncryptionConfig table_encryption(const TableSchema& schema, WrapMode mode,
                                  std::shared_ptr<KmsClient> kms,
                                  std::shared_ptr<KekCache> cache);

/// Deterministic: identical config -> identical tables.  Per patient 1–5
/// encounters, each with 0–3 conditions and 0–2 prescriptions.
EmrTables generate(const GenConfig& config);

/// Deterministic file id for generator output, so plaintext reruns are
/// byte-identical.
crypto::FileId derive_file_id(uint64_t seed, std::string_view table_name, uint32_t batch);

/// Rows of `t` split into `row_groups` consecutive, near-equal groups.
Table repartition(const Table& t, size_t row_groups);

struct EncSetup {
  WrapMode mode = WrapMode::Double;
  std::shared_ptr<KmsClient> kms;
  std::shared_ptr<KekCache> cache;
};

/// Writes the tables under out_dir as <table>.ccf, or — when
/// config.batch_days = D — as <table>.batch<k>.ccf for k in [0, D),
/// partitioned by encounter start date (conditions and prescriptions follow
/// their encounter; patients follow their earliest encounter).  Returns
/// footers in (table, batch) order.
std::vector<FileFooter> write_batches(const EmrTables& tables, const GenConfig& config,
                                      const std::optional<EncSetup>& enc,
                                      const std::filesystem::path& out_dir,
                                      uint32_t row_groups = 1);

}  // namespace ccf::emr
