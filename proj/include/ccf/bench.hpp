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

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ccf/keytools.hpp"

namespace ccf::bench {

enum class Mode { Plain, Single, Double };

std::string_view mode_name(Mode m);
Mode mode_from_name(std::string_view name);  // throws DataError

struct BenchConfig {
  std::vector<uint32_t> patient_sizes{1000};
  std::vector<Mode> modes{Mode::Plain, Mode::Single, Mode::Double};
  std::chrono::milliseconds rtt{50};
  uint32_t repetitions = 3;
  std::chrono::milliseconds kek_ttl = kDefaultKekTtl;
  std::filesystem::path out_csv;   // empty: no file emitted
  std::filesystem::path work_dir;  // dataset + result scratch space
  uint64_t seed = 42;
  uint32_t row_groups = 4;  // per input table file
  bool parallel_kernels = false;
};

/// One measured run (the per-cell warm-up run is discarded).
struct BenchRecord {
  std::string mode;
  uint32_t patients = 0;
  int64_t rtt_ms = 0;
  uint32_t run = 1;  // 1-based
  double elapsed_ms = 0;
  uint64_t kms_wrap_calls = 0;
  uint64_t kms_unwrap_calls = 0;
  /// (elapsed − mean plain) / mean plain · 100; only set for encrypted
  /// modes and only when plain ran too.
  std::optional<double> overhead_pct;

  bool operator==(const BenchRecord&) const = default;
};

/// Side data for the law checks: exact per-run KMS call counts derived from
/// the written files' metadata, and the worst injected KMS latency seen.
struct CellLaw {
  std::string mode;
  uint32_t patients = 0;
  uint64_t expected_unwraps = 0;
  uint64_t expected_wraps = 0;
  std::chrono::milliseconds max_injected_latency{0};
};

struct BenchReport {
  std::vector<BenchRecord> records;
  std::vector<CellLaw> laws;
};

/// (n_read_tables·n_keys_per_table + n_write_tables·n_keys_per_table)·rtt —
/// the serial key-retrieval upper bound; (4, 3, 1, 470ms) = 7050ms.
std::chrono::milliseconds cost_upper_bound(uint64_t n_read_tables, uint64_t n_keys_per_table,
                                           uint64_t n_write_tables,
                                           std::chrono::milliseconds rtt);

/// Generates the datasets (4 tables per size, 3 MEKs each, against an
/// in-process KMS), then per (size, mode): one discarded warm-up plus
/// `repetitions` measured runs of [full-table scans + misuse query +
/// encrypted persist], each with fresh caches and a latency-injected KMS
/// client.  Writes out_csv when set.
BenchReport run_experiment(const BenchConfig& config);

/// Header "mode,patients,rtt_ms,run,elapsed_ms,kms_wrap_calls,
/// kms_unwrap_calls,overhead_pct"; rows in (size, mode, run) order.
std::string records_to_csv(const std::vector<BenchRecord>& records);
void emit_csv(const std::vector<BenchRecord>& records, const std::filesystem::path& path);
std::vector<BenchRecord> parse_records_csv(const std::string& text);

/// Violations of the bound, call-count, and ordering laws (empty = pass).
std::vector<std::string> check_laws(const BenchReport& report, const BenchConfig& config);

}  // namespace ccf::bench
