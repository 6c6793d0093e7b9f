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

#include "ccf/emrgen.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <unordered_map>

#include "ccf/errors.hpp"

namespace ccf::emr {

namespace {

constexpr int64_t kEpochStart = 16436;   // 2015-01-01, days since Unix epoch
constexpr int64_t kDateSpanDays = 3652;  // ten years of encounter starts

/// Deterministic sampling helpers over mt19937_64.  std::*_distribution is
/// implementation-defined, so draws are derived from raw engine output.
class Sampler {
 public:
  explicit Sampler(uint64_t seed) : rng_(seed) {}

  /// Unbiased draw from [0, n).
  uint64_t bounded(uint64_t n) {
    const uint64_t limit =
        std::numeric_limits<uint64_t>::max() - std::numeric_limits<uint64_t>::max() % n;
    uint64_t x = rng_();
    while (x >= limit) x = rng_();
    return x % n;
  }

  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  /// Index drawn proportionally to `weights`.
  size_t weighted(const std::vector<double>& cumulative) {
    const double r = unit() * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    return std::min<size_t>(static_cast<size_t>(it - cumulative.begin()),
                            cumulative.size() - 1);
  }

 private:
  std::mt19937_64 rng_;
};

std::string padded_id(char prefix, uint64_t n, int width) {
  std::string digits = std::to_string(n);
  std::string out(1, prefix);
  out.append(static_cast<size_t>(width) > digits.size() ? width - digits.size() : 0, '0');
  out += digits;
  return out;
}

std::vector<double> cumulative_weights(std::span<const ConditionEntry> catalog,
                                       const std::map<std::string, double>& bias) {
  for (const auto& [name, weight] : bias) {
    if (weight <= 0) throw DataError("bias weight for '" + name + "' must be positive");
    if (std::none_of(catalog.begin(), catalog.end(),
                     [&](const ConditionEntry& e) { return e.name == name; })) {
      throw DataError("bias names unknown condition '" + name + "'");
    }
  }
  std::vector<double> cum;
  double total = 0;
  for (const ConditionEntry& e : catalog) {
    const auto it = bias.find(std::string(e.name));
    total += e.base_weight * (it == bias.end() ? 1.0 : it->second);
    cum.push_back(total);
  }
  return cum;
}

Table empty_table(std::string_view name) {
  const TableSchema schema = table_schema(name);
  RowGroup rg;
  for (const ColumnSpec& c : schema.columns) rg.emplace_back(ColumnVector(c.type));
  return Table{schema, {std::move(rg)}};
}

// splitmix64, the standard seed mixer; pinned here so file ids never depend
// on library internals.
uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : s) {
    h ^= static_cast<uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

void append_row(Table& out, const Table& in, size_t rg, size_t row) {
  for (size_t col = 0; col < in.schema.columns.size(); ++col) {
    const ColumnVector& src = in.row_groups[rg][col];
    ColumnVector& dst = out.row_groups[0][col];
    if (src.is_null(row)) {
      dst.append_null();
      continue;
    }
    switch (src.type()) {
      case ColumnType::Int64:
      case ColumnType::Date: dst.append_int64(src.int64_at(row)); break;
      case ColumnType::Double: dst.append_double(src.double_at(row)); break;
      case ColumnType::String: dst.append_string(src.string_at(row)); break;
      case ColumnType::Bool: dst.append_bool(src.bool_at(row)); break;
    }
  }
}

}  // namespace

const Table& EmrTables::table(std::string_view name) const {
  if (name == "patients") return patients;
  if (name == "encounters") return encounters;
  if (name == "conditions") return conditions;
  if (name == "prescriptions") return prescriptions;
  throw SchemaError("unknown table '" + std::string(name) + "'");
}

EncryptionConfig table_encryption(const TableSchema& schema, WrapMode mode,
                                  std::shared_ptr<KmsClient> kms,
                                  std::shared_ptr<KekCache> cache) {
  const auto sensitive = sensitive_columns(schema.table_name);
  EncryptionConfig enc;
  enc.footer_key_id = schema.table_name + ".footer";
  enc.mode = mode;
  enc.kms = std::move(kms);
  enc.cache = std::move(cache);
  for (const ColumnSpec& col : schema.columns) {
    const bool is_sensitive =
        std::find(sensitive.begin(), sensitive.end(), col.name) != sensitive.end();
    enc.column_keys[col.name] = schema.table_name + (is_sensitive ? ".sensitive" : ".other");
  }
  return enc;
}

EmrTables generate(const GenConfig& config) {
  EmrTables tables{empty_table("patients"), empty_table("encounters"), empty_table("conditions"),
                   empty_table("prescriptions")};
  Sampler rng(config.seed);
  const std::vector<double> condition_cum = cumulative_weights(condition_catalog(), config.bias);
  const std::vector<double> drug_cum = cumulative_weights(drug_catalog(), {});

  RowGroup& pat = tables.patients.row_groups[0];
  RowGroup& enc = tables.encounters.row_groups[0];
  RowGroup& cond = tables.conditions.row_groups[0];
  RowGroup& rx = tables.prescriptions.row_groups[0];

  uint64_t encounter_seq = 0;
  uint64_t condition_seq = 0;
  uint64_t prescription_seq = 0;
  for (uint32_t p = 0; p < config.patients; ++p) {
    const std::string patient_id = padded_id('P', p, 7);
    pat[0].append_string(patient_id);
    pat[1].append_int64(1930 + static_cast<int64_t>(rng.bounded(90)));
    if (rng.bounded(50) == 0) {
      pat[2].append_null();
    } else {
      pat[2].append_string(rng.bounded(2) == 0 ? "F" : "M");
    }

    const uint64_t encounters_n = 1 + rng.bounded(5);
    for (uint64_t e = 0; e < encounters_n; ++e) {
      const std::string encounter_id = padded_id('E', encounter_seq++, 8);
      const int64_t start = kEpochStart + static_cast<int64_t>(rng.bounded(kDateSpanDays));
      const int64_t end = start + static_cast<int64_t>(rng.bounded(14));
      enc[0].append_string(encounter_id);
      enc[1].append_string(patient_id);
      enc[2].append_int64(start);
      enc[3].append_int64(end);

      // onset/prescription dates live in [start, end + 30]
      const uint64_t date_choices = static_cast<uint64_t>(end - start) + 31;

      const uint64_t conditions_n = rng.bounded(4);
      for (uint64_t c = 0; c < conditions_n; ++c) {
        cond[0].append_string(padded_id('C', condition_seq++, 8));
        cond[1].append_string(patient_id);
        cond[2].append_string(encounter_id);
        cond[3].append_int64(start + static_cast<int64_t>(rng.bounded(date_choices)));
        cond[4].append_string(std::string(condition_catalog()[rng.weighted(condition_cum)].name));
      }

      const uint64_t prescriptions_n = rng.bounded(3);
      for (uint64_t r = 0; r < prescriptions_n; ++r) {
        rx[0].append_string(padded_id('R', prescription_seq++, 8));
        rx[1].append_string(patient_id);
        rx[2].append_string(encounter_id);
        rx[3].append_int64(start + static_cast<int64_t>(rng.bounded(date_choices)));
        rx[4].append_string(std::string(drug_catalog()[rng.weighted(drug_cum)].name));
      }
    }
  }
  return tables;
}

crypto::FileId derive_file_id(uint64_t seed, std::string_view table_name, uint32_t batch) {
  const uint64_t base = splitmix64(seed ^ fnv1a64(table_name) ^ (0x1000ULL + batch));
  const uint64_t lo = splitmix64(base);
  const uint64_t hi = splitmix64(base ^ 0x5851f42d4c957f2dULL);
  crypto::FileId id{};
  for (int i = 0; i < 8; ++i) {
    id[i] = static_cast<uint8_t>(lo >> (8 * i));
    id[8 + i] = static_cast<uint8_t>(hi >> (8 * i));
  }
  return id;
}

Table repartition(const Table& t, size_t row_groups) {
  if (row_groups == 0) throw SchemaError("row_groups must be positive");
  size_t total = 0;
  for (const RowGroup& rg : t.row_groups) total += rg.empty() ? 0 : rg[0].size();

  Table out{t.schema, {}};
  const size_t base = total / row_groups;
  const size_t extra = total % row_groups;

  size_t src_rg = 0;
  size_t src_row = 0;
  auto advance = [&] {
    ++src_row;
    while (src_rg < t.row_groups.size() &&
           (t.row_groups[src_rg].empty() || src_row >= t.row_groups[src_rg][0].size())) {
      ++src_rg;
      src_row = 0;
    }
  };
  while (src_rg < t.row_groups.size() &&
         (t.row_groups[src_rg].empty() || t.row_groups[src_rg][0].size() == 0)) {
    ++src_rg;
  }

  for (size_t g = 0; g < row_groups; ++g) {
    Table group{t.schema, {RowGroup{}}};
    for (const ColumnSpec& c : t.schema.columns) {
      group.row_groups[0].emplace_back(ColumnVector(c.type));
    }
    const size_t rows_here = base + (g < extra ? 1 : 0);
    for (size_t i = 0; i < rows_here; ++i) {
      append_row(group, t, src_rg, src_row);
      advance();
    }
    out.row_groups.push_back(std::move(group.row_groups[0]));
  }
  return out;
}

std::vector<FileFooter> write_batches(const EmrTables& tables, const GenConfig& config,
                                      const std::optional<EncSetup>& enc,
                                      const std::filesystem::path& out_dir, uint32_t row_groups) {
  std::filesystem::create_directories(out_dir);
  const uint32_t batches = config.batch_days.value_or(1);
  if (batches == 0) throw DataError("batch_days must be positive");

  // Encounter -> batch by start date; min/max over the whole dataset.
  std::unordered_map<std::string, uint32_t> encounter_batch;
  uint32_t patient_batch_default = 0;
  std::unordered_map<std::string, uint32_t> patient_batch;
  if (batches > 1) {
    const ColumnVector& eid = tables.encounters.row_groups[0][0];
    const ColumnVector& pid = tables.encounters.row_groups[0][1];
    const ColumnVector& start = tables.encounters.row_groups[0][2];
    int64_t lo = std::numeric_limits<int64_t>::max();
    int64_t hi = std::numeric_limits<int64_t>::min();
    for (size_t i = 0; i < start.size(); ++i) {
      lo = std::min(lo, start.int64_at(i));
      hi = std::max(hi, start.int64_at(i));
    }
    const int64_t span = start.size() == 0 ? 1 : hi - lo + 1;
    for (size_t i = 0; i < start.size(); ++i) {
      const auto b = static_cast<uint32_t>((start.int64_at(i) - lo) * batches / span);
      encounter_batch[eid.string_at(i)] = b;
      const auto it = patient_batch.find(pid.string_at(i));
      if (it == patient_batch.end() || b < it->second) patient_batch[pid.string_at(i)] = b;
    }
  }

  auto batch_of = [&](std::string_view table, const Table& t, size_t row) -> uint32_t {
    if (batches == 1) return 0;
    if (table == "patients") {
      const auto it = patient_batch.find(t.row_groups[0][0].string_at(row));
      return it == patient_batch.end() ? patient_batch_default : it->second;
    }
    const uint16_t eid_col = table == "encounters" ? 0 : 2;
    return encounter_batch.at(t.row_groups[0][eid_col].string_at(row));
  };

  std::vector<FileFooter> footers;
  for (const std::string_view name : table_names()) {
    const Table& whole = tables.table(name);

    std::vector<Table> parts;
    for (uint32_t b = 0; b < batches; ++b) parts.push_back(empty_table(name));
    const size_t rows = whole.row_groups[0].empty() ? 0 : whole.row_groups[0][0].size();
    for (size_t row = 0; row < rows; ++row) {
      append_row(parts[batch_of(name, whole, row)], whole, 0, row);
    }

    for (uint32_t b = 0; b < batches; ++b) {
      const Table sliced = row_groups > 1 ? repartition(parts[b], row_groups) : parts[b];
      std::optional<EncryptionConfig> table_enc;
      if (enc) table_enc = table_encryption(sliced.schema, enc->mode, enc->kms, enc->cache);

      WriteOptions opts;
      opts.file_id = derive_file_id(config.seed, name, b);
      const std::string file_name = config.batch_days
                                        ? std::string(name) + ".batch" + std::to_string(b) + ".ccf"
                                        : std::string(name) + ".ccf";
      footers.push_back(
          write_table_file(sliced.schema, sliced.row_groups, table_enc, out_dir / file_name, opts));
    }
  }
  return footers;
}

}  // namespace ccf::emr
