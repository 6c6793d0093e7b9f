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

#include "ccf/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "ccf/csv.hpp"
#include "ccf/emrgen.hpp"
#include "ccf/errors.hpp"
#include "ccf/query.hpp"

namespace ccf::bench {

namespace {

constexpr const char* kCsvHeader =
    "mode,patients,rtt_ms,run,elapsed_ms,kms_wrap_calls,kms_unwrap_calls,overhead_pct";

WrapMode wrap_mode_of(Mode m) { return m == Mode::Single ? WrapMode::Single : WrapMode::Double; }

/// Key material of the footer module, read from the plaintext key-material
/// region of a "CCFE" file — metadata only, nothing is decrypted.
KeyMaterial footer_key_material(const RandomAccessSource& source) {
  const uint64_t size = source.size();
  const uint32_t footer_len = get_u32_le(source.read_at(size - 8, 4).data());
  const uint32_t km_len = get_u32_le(source.read_at(size - 12, 4).data());
  const uint64_t km_pos = size - 12 - footer_len - km_len;
  return decode_key_material(to_string(source.read_at(km_pos, km_len)));
}

/// Exact KMS calls a cold-cache pass over these materials costs.
uint64_t expected_calls(const std::vector<KeyMaterial>& materials, WrapMode mode) {
  if (mode == WrapMode::Single) return materials.size();
  std::set<std::pair<std::string, std::string>> keks;
  for (const KeyMaterial& km : materials) {
    keks.insert({km.master_key_id, km.kek_id.value_or("")});
  }
  return keks.size();
}

std::vector<KeyMaterial> file_materials(const FileFooter& footer,
                                        const std::filesystem::path& path) {
  std::vector<KeyMaterial> out;
  for (const RowGroupMeta& rg : footer.row_groups) {
    for (const ColumnChunkMeta& c : rg.chunks) {
      if (c.key_material) out.push_back(*c.key_material);
    }
  }
  out.push_back(footer_key_material(FileSource(path)));
  return out;
}

std::vector<std::string> full_projection(const TableSchema& schema) {
  std::vector<std::string> names;
  for (const ColumnSpec& c : schema.columns) names.push_back(c.name);
  return names;
}

double mean_elapsed(const std::vector<BenchRecord>& records, std::string_view mode,
                    uint32_t patients) {
  double sum = 0;
  size_t n = 0;
  for (const BenchRecord& r : records) {
    if (r.mode == mode && r.patients == patients) {
      sum += r.elapsed_ms;
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : std::nan("");
}

std::optional<double> parse_optional_double(const csv::CsvField& f) {
  if (f.text.empty() && !f.quoted) return std::nullopt;
  double v = 0;
  const auto [p, ec] = std::from_chars(f.text.data(), f.text.data() + f.text.size(), v);
  if (ec != std::errc{} || p != f.text.data() + f.text.size()) {
    throw DecodingError("bench csv: bad number '" + f.text + "'");
  }
  return v;
}

uint64_t parse_u64(const csv::CsvField& f) {
  uint64_t v = 0;
  const auto [p, ec] = std::from_chars(f.text.data(), f.text.data() + f.text.size(), v);
  if (ec != std::errc{} || p != f.text.data() + f.text.size()) {
    throw DecodingError("bench csv: bad integer '" + f.text + "'");
  }
  return v;
}

}  // namespace

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::Plain: return "plain";
    case Mode::Single: return "single";
    case Mode::Double: return "double";
  }
  return "plain";
}

Mode mode_from_name(std::string_view name) {
  if (name == "plain") return Mode::Plain;
  if (name == "single") return Mode::Single;
  if (name == "double") return Mode::Double;
  throw DataError("unknown bench mode '" + std::string(name) + "'");
}

std::chrono::milliseconds cost_upper_bound(uint64_t n_read_tables, uint64_t n_keys_per_table,
                                           uint64_t n_write_tables,
                                           std::chrono::milliseconds rtt) {
  return rtt * ((n_read_tables + n_write_tables) * n_keys_per_table);
}

BenchReport run_experiment(const BenchConfig& config) {
  if (config.repetitions < 1) throw DataError("bench: repetitions must be >= 1");
  if (config.work_dir.empty()) throw DataError("bench: work_dir required");
  if (config.patient_sizes.empty() || config.modes.empty()) {
    throw DataError("bench: need at least one size and one mode");
  }
  std::filesystem::create_directories(config.work_dir);

  const MisuseQueryParams params;  // representative defaults
  BenchReport report;

  for (const uint32_t patients : config.patient_sizes) {
    emr::GenConfig gen_config;
    gen_config.patients = patients;
    gen_config.seed = config.seed;
    const emr::EmrTables tables = emr::generate(gen_config);
    const size_t size_records_begin = report.records.size();

    for (const Mode mode : config.modes) {
      const std::filesystem::path dir =
          config.work_dir / (std::to_string(patients) + "_" + std::string(mode_name(mode)));
      std::filesystem::create_directories(dir);

      // Dataset prep (not measured): local in-process KMS, no latency.
      auto store = std::make_shared<KmsKeyStore>("bench-admin");
      std::vector<std::string> all_tables(emr::table_names().begin(), emr::table_names().end());
      all_tables.emplace_back("misuse_result");
      for (const std::string& t : all_tables) {
        for (const std::string& key_id : emr::master_key_ids(t)) {
          store->create_master_key("bench-admin", key_id, {"bench"});
        }
      }
      auto prep_client = std::make_shared<InMemoryKmsClient>(store, "bench");

      std::vector<KeyMaterial> input_materials;
      for (const std::string_view name : emr::table_names()) {
        const Table sliced = emr::repartition(tables.table(name), config.row_groups);
        std::optional<EncryptionConfig> enc;
        if (mode != Mode::Plain) {
          enc = emr::table_encryption(sliced.schema, wrap_mode_of(mode), prep_client,
                                      std::make_shared<KekCache>(config.kek_ttl));
        }
        WriteOptions opts;
        opts.file_id = emr::derive_file_id(config.seed, name, 0);
        const std::filesystem::path path = dir / (std::string(name) + ".ccf");
        const FileFooter footer = write_table_file(sliced.schema, sliced.row_groups, enc, path, opts);
        if (mode != Mode::Plain) {
          const auto materials = file_materials(footer, path);
          input_materials.insert(input_materials.end(), materials.begin(), materials.end());
        }
      }

      CellLaw law;
      law.mode = mode_name(mode);
      law.patients = patients;

      // Warm-up run 0 discarded; runs 1..repetitions recorded.
      for (uint32_t run = 0; run <= config.repetitions; ++run) {
        auto cache = std::make_shared<KekCache>(config.kek_ttl);
        std::shared_ptr<KmsClient> client;
        std::unique_ptr<KeyResolver> resolver;
        if (mode != Mode::Plain) {
          client = with_latency(std::make_shared<InMemoryKmsClient>(store, "bench"), config.rtt);
          resolver = std::make_unique<KeyResolver>(client, cache);
        }

        const auto t0 = std::chrono::steady_clock::now();
        std::vector<Table> scanned;
        for (const std::string_view name : emr::table_names()) {
          const SourceList sources{std::make_shared<FileSource>(dir / (std::string(name) + ".ccf"))};
          scanned.push_back(scan(sources, full_projection(emr::table_schema(name)), nullptr,
                                 resolver.get(), ScanOptions{config.parallel_kernels})
                                .to_table());
        }
        const ResultSet result =
            misuse_query_tables(scanned[3], scanned[1], scanned[2], params);
        std::optional<EncryptionConfig> out_enc;
        if (mode != Mode::Plain) {
          out_enc = emr::table_encryption(ResultSet::result_schema(), wrap_mode_of(mode), client,
                                          cache);
        }
        const FileFooter out_footer =
            persist_result_file(result, out_enc, dir / "result.ccf");
        const auto t1 = std::chrono::steady_clock::now();

        const KmsStats stats = client ? client->stats() : KmsStats{};
        if (run == 0) {
          if (mode != Mode::Plain) {
            law.expected_unwraps = expected_calls(input_materials, wrap_mode_of(mode));
            law.expected_wraps =
                expected_calls(file_materials(out_footer, dir / "result.ccf"), wrap_mode_of(mode));
          }
          continue;
        }

        BenchRecord rec;
        rec.mode = mode_name(mode);
        rec.patients = patients;
        rec.rtt_ms = config.rtt.count();
        rec.run = run;
        rec.elapsed_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        rec.kms_wrap_calls = stats.wrap_calls;
        rec.kms_unwrap_calls = stats.unwrap_calls;
        report.records.push_back(std::move(rec));
        law.max_injected_latency = std::max(law.max_injected_latency,
                                            stats.total_injected_latency);
      }
      report.laws.push_back(std::move(law));
    }

    // Overheads against the plain mean for this size.
    const bool plain_ran = std::find(config.modes.begin(), config.modes.end(), Mode::Plain) !=
                           config.modes.end();
    if (plain_ran) {
      const double plain_mean = mean_elapsed(report.records, "plain", patients);
      for (size_t i = size_records_begin; i < report.records.size(); ++i) {
        BenchRecord& r = report.records[i];
        if (r.mode != "plain") {
          r.overhead_pct = (r.elapsed_ms - plain_mean) / plain_mean * 100.0;
        }
      }
    }
  }

  if (!config.out_csv.empty()) emit_csv(report.records, config.out_csv);
  return report;
}

std::string records_to_csv(const std::vector<BenchRecord>& records) {
  std::string out = kCsvHeader;
  out += "\r\n";
  for (const BenchRecord& r : records) {
    out += r.mode;
    out += ',';
    out += std::to_string(r.patients);
    out += ',';
    out += std::to_string(r.rtt_ms);
    out += ',';
    out += std::to_string(r.run);
    out += ',';
    out += csv::format_double(r.elapsed_ms);
    out += ',';
    out += std::to_string(r.kms_wrap_calls);
    out += ',';
    out += std::to_string(r.kms_unwrap_calls);
    out += ',';
    if (r.overhead_pct) out += csv::format_double(*r.overhead_pct);
    out += "\r\n";
  }
  return out;
}

void emit_csv(const std::vector<BenchRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  const std::string text = records_to_csv(records);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("short write to " + path.string());
}

std::vector<BenchRecord> parse_records_csv(const std::string& text) {
  const auto rows = csv::parse_rows(text);
  if (rows.empty()) throw DecodingError("bench csv: missing header");
  {
    std::string header;
    for (size_t i = 0; i < rows[0].size(); ++i) {
      if (i) header += ',';
      header += rows[0][i].text;
    }
    if (header != kCsvHeader) throw DecodingError("bench csv: unexpected header");
  }
  std::vector<BenchRecord> records;
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 8) throw DecodingError("bench csv: bad row width");
    BenchRecord r;
    r.mode = row[0].text;
    r.patients = static_cast<uint32_t>(parse_u64(row[1]));
    r.rtt_ms = static_cast<int64_t>(parse_u64(row[2]));
    r.run = static_cast<uint32_t>(parse_u64(row[3]));
    r.elapsed_ms = parse_optional_double(row[4]).value_or(0);
    r.kms_wrap_calls = parse_u64(row[5]);
    r.kms_unwrap_calls = parse_u64(row[6]);
    r.overhead_pct = parse_optional_double(row[7]);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<std::string> check_laws(const BenchReport& report, const BenchConfig& config) {
  std::vector<std::string> violations;
  auto law_of = [&](const std::string& mode, uint32_t patients) -> const CellLaw* {
    for (const CellLaw& l : report.laws) {
      if (l.mode == mode && l.patients == patients) return &l;
    }
    return nullptr;
  };

  // Call-count law: every measured run matches the metadata-derived counts.
  for (const BenchRecord& r : report.records) {
    const CellLaw* law = law_of(r.mode, r.patients);
    if (!law) continue;
    if (r.kms_unwrap_calls != law->expected_unwraps || r.kms_wrap_calls != law->expected_wraps) {
      violations.push_back("call counts for " + r.mode + "/" + std::to_string(r.patients) +
                           " run " + std::to_string(r.run) + ": got " +
                           std::to_string(r.kms_unwrap_calls) + " unwraps / " +
                           std::to_string(r.kms_wrap_calls) + " wraps, expected " +
                           std::to_string(law->expected_unwraps) + " / " +
                           std::to_string(law->expected_wraps));
    }
  }

  // Bound law: double-mode injected latency within the serial upper bound.
  const std::chrono::milliseconds bound = cost_upper_bound(4, 3, 1, config.rtt);
  for (const CellLaw& l : report.laws) {
    if (l.mode == "double" && l.max_injected_latency > bound) {
      violations.push_back("bound law at " + std::to_string(l.patients) + " patients: injected " +
                           std::to_string(l.max_injected_latency.count()) + "ms > bound " +
                           std::to_string(bound.count()) + "ms");
    }
  }

  // Ordering / tolerance laws need a plain baseline.
  const auto has_mode = [&](Mode m) {
    return std::find(config.modes.begin(), config.modes.end(), m) != config.modes.end();
  };
  if (!has_mode(Mode::Plain)) return violations;

  for (const uint32_t patients : config.patient_sizes) {
    const double plain = mean_elapsed(report.records, "plain", patients);
    const double single = mean_elapsed(report.records, "single", patients);
    const double dbl = mean_elapsed(report.records, "double", patients);
    if (config.rtt.count() >= 50 && has_mode(Mode::Single) && has_mode(Mode::Double)) {
      if (!(single > dbl && dbl > plain)) {
        violations.push_back("ordering law at " + std::to_string(patients) +
                             " patients: mean single " + csv::format_double(single) +
                             "ms, double " + csv::format_double(dbl) + "ms, plain " +
                             csv::format_double(plain) + "ms");
      }
    }
    if (config.rtt.count() == 0) {
      for (const Mode m : {Mode::Single, Mode::Double}) {
        if (!has_mode(m)) continue;
        const double mean = mean_elapsed(report.records, std::string(mode_name(m)), patients);
        const double overhead = (mean - plain) / plain * 100.0;
        if (std::abs(overhead) > 15.0) {
          violations.push_back("local-KMS overhead at " + std::to_string(patients) +
                               " patients, mode " + std::string(mode_name(m)) + ": " +
                               csv::format_double(overhead) + "% exceeds 15%");
        }
      }
    }
  }
  return violations;
}

}  // namespace ccf::bench
