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

// ccf — columnar EMR files with envelope encryption.
//
// Exit codes: 0 success, 1 runtime failure, 2 bad flags, 3 access denied,
// 4 integrity failure, 5 bench check failure.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ccf/bench.hpp"
#include "ccf/csv.hpp"
#include "ccf/emrgen.hpp"
#include "ccf/errors.hpp"
#include "ccf/kms_server.hpp"
#include "ccf/query.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitAccessDenied = 3;
constexpr int kExitIntegrity = 4;
constexpr int kExitBenchCheck = 5;

std::string env_token() {
  const char* t = std::getenv("CCF_KMS_TOKEN");
  return t ? t : "";
}

struct KmsFlags {
  std::string url;
  std::string token;
  int64_t ttl_seconds = 600;

  std::string resolved_token() const { return token.empty() ? env_token() : token; }

  std::shared_ptr<ccf::KmsClient> client() const {
    return ccf::http_client(url, resolved_token());
  }
  std::shared_ptr<ccf::KekCache> cache() const {
    return std::make_shared<ccf::KekCache>(std::chrono::seconds(ttl_seconds));
  }
};

void add_kms_flags(CLI::App& cmd, KmsFlags& flags, bool required) {
  auto* url = cmd.add_option("--kms", flags.url, "KMS base URL (http://host:port)");
  if (required) url->required();
  cmd.add_option("--token", flags.token, "bearer token (default: env CCF_KMS_TOKEN)");
  cmd.add_option("--ttl", flags.ttl_seconds, "KEK cache TTL in seconds")
      ->check(CLI::NonNegativeNumber);
}

std::map<std::string, double> parse_bias(const std::string& text) {
  std::map<std::string, double> bias;
  std::string item;
  std::stringstream in(text);
  while (std::getline(in, item, ',')) {
    const size_t eq = item.rfind('=');
    if (eq == std::string::npos || eq == 0) {
      throw CLI::ValidationError("--bias", "expected name=weight[,name=weight...]");
    }
    try {
      bias[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--bias", "bad weight in '" + item + "'");
    }
  }
  return bias;
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream in(text);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// Creates the three conventional master keys for a table, tolerating
/// re-runs against a server that already has them.
void ensure_table_keys(const std::string& kms_url, const std::string& admin_token,
                       const std::string& token, std::string_view table) {
  for (const std::string& key_id : ccf::emr::master_key_ids(table)) {
    try {
      ccf::http_create_master_key(kms_url, admin_token, key_id, {token});
    } catch (const ccf::DuplicateKey&) {
      // fine: reusing an existing key space
    }
  }
}

ccf::SourceList open_sources(const std::vector<std::filesystem::path>& paths) {
  ccf::SourceList sources;
  for (const auto& p : paths) sources.push_back(std::make_shared<ccf::FileSource>(p));
  return sources;
}

std::vector<std::filesystem::path> table_files(const std::filesystem::path& dir,
                                               std::string_view table) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dir)) return files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind(std::string(table) + ".", 0) == 0 && name.size() >= 4 &&
        name.substr(name.size() - 4) == ".ccf") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

int cmd_gen(uint32_t patients, uint64_t seed, const std::string& out_dir, const std::string& bias,
            std::optional<uint32_t> batch_days, bool encrypt, const std::string& mode_name,
            const KmsFlags& kms, const std::string& admin_token, uint32_t row_groups) {
  ccf::emr::GenConfig config;
  config.patients = patients;
  config.seed = seed;
  config.bias = parse_bias(bias);
  config.batch_days = batch_days;

  std::optional<ccf::emr::EncSetup> enc;
  if (encrypt) {
    ccf::emr::EncSetup setup;
    setup.mode = mode_name == "single" ? ccf::WrapMode::Single : ccf::WrapMode::Double;
    for (const std::string_view t : ccf::emr::table_names()) {
      ensure_table_keys(kms.url, admin_token, kms.resolved_token(), t);
    }
    setup.kms = kms.client();
    setup.cache = kms.cache();
    enc = std::move(setup);
  }

  const ccf::emr::EmrTables tables = ccf::emr::generate(config);
  ccf::emr::write_batches(tables, config, enc, out_dir, row_groups);

  for (const std::string_view name : ccf::emr::table_names()) {
    const ccf::Table& t = tables.table(name);
    size_t rows = 0;
    for (const auto& rg : t.row_groups) {
      if (!rg.empty()) rows += rg[0].size();
    }
    std::cerr << name << ": " << rows << " rows\n";
  }
  return kExitOk;
}

int cmd_read(const std::string& file, const std::string& columns, const KmsFlags& kms) {
  const ccf::FileSource source(file);

  std::unique_ptr<ccf::KeyResolver> resolver;
  if (!kms.url.empty()) {
    resolver = std::make_unique<ccf::KeyResolver>(kms.client(), kms.cache());
  }

  const ccf::FileFooter footer = ccf::read_footer(source, resolver.get());
  std::vector<std::string> projection =
      columns.empty() ? std::vector<std::string>{} : split_list(columns, ',');
  if (columns.empty()) {
    for (const ccf::ColumnSpec& c : footer.schema.columns) projection.push_back(c.name);
  }

  const auto groups = ccf::read_columns(source, footer, projection, resolver.get());
  ccf::Table out;
  out.schema.table_name = footer.schema.table_name;
  for (const std::string& name : projection) {
    out.schema.columns.push_back(footer.schema.columns[footer.schema.ordinal_of(name)]);
  }
  for (const auto& g : groups) out.row_groups.push_back(g.columns);
  std::cout << ccf::csv::to_csv(out);
  return kExitOk;
}

int cmd_query(const std::string& data_dir, const std::string& drug, const std::string& exclude,
              int64_t window_days, const std::string& out_file, const KmsFlags& kms,
              const std::string& mode_name, const std::string& admin_token) {
  ccf::MisuseQueryParams params;
  params.drug = drug;
  if (!exclude.empty()) {
    params.excluded_conditions.clear();
    for (const std::string& c : split_list(exclude, ';')) params.excluded_conditions.insert(c);
  }
  params.window_extension_days = window_days;

  const auto rx_files = table_files(data_dir, "prescriptions");
  const auto enc_files = table_files(data_dir, "encounters");
  const auto cond_files = table_files(data_dir, "conditions");
  if (rx_files.empty() || enc_files.empty() || cond_files.empty()) {
    std::cerr << "no input files under " << data_dir << "\n";
    return kExitRuntime;
  }

  std::shared_ptr<ccf::KmsClient> client;
  std::shared_ptr<ccf::KekCache> cache;
  std::unique_ptr<ccf::KeyResolver> resolver;
  if (!kms.url.empty()) {
    client = kms.client();
    cache = kms.cache();
    resolver = std::make_unique<ccf::KeyResolver>(client, cache);
  }

  const auto t0 = std::chrono::steady_clock::now();
  const ccf::ResultSet result =
      ccf::misuse_query(open_sources(rx_files), open_sources(enc_files), open_sources(cond_files),
                        params, resolver.get());

  std::optional<ccf::EncryptionConfig> out_enc;
  if (client) {
    ensure_table_keys(kms.url, admin_token, kms.resolved_token(), "misuse_result");
    out_enc = ccf::emr::table_encryption(
        ccf::ResultSet::result_schema(),
        mode_name == "single" ? ccf::WrapMode::Single : ccf::WrapMode::Double, client, cache);
  }
  ccf::persist_result_file(result, out_enc, out_file);
  const auto t1 = std::chrono::steady_clock::now();

  std::cerr << result.rows.size() << " rows in "
            << std::chrono::duration<double, std::milli>(t1 - t0).count() << " ms\n";
  std::cout << "rows,elapsed_ms\r\n"
            << result.rows.size() << ","
            << ccf::csv::format_double(std::chrono::duration<double, std::milli>(t1 - t0).count())
            << "\r\n";
  return kExitOk;
}

int cmd_bench(const std::string& sizes, const std::string& modes, int64_t rtt_ms, uint32_t reps,
              const std::string& csv_path, bool check, const std::string& work_dir, uint64_t seed,
              int64_t ttl_seconds, uint32_t row_groups) {
  ccf::bench::BenchConfig config;
  config.patient_sizes.clear();
  for (const std::string& s : split_list(sizes, ',')) {
    size_t suffix = 0;
    const unsigned long v = std::stoul(s, &suffix);
    config.patient_sizes.push_back(static_cast<uint32_t>(
        suffix < s.size() && (s[suffix] == 'k' || s[suffix] == 'K') ? v * 1000 : v));
  }
  config.modes.clear();
  for (const std::string& m : split_list(modes, ',')) {
    config.modes.push_back(ccf::bench::mode_from_name(m));
  }
  config.rtt = std::chrono::milliseconds(rtt_ms);
  config.repetitions = reps;
  config.kek_ttl = std::chrono::seconds(ttl_seconds);
  config.out_csv = csv_path;
  config.work_dir = work_dir.empty() ? std::filesystem::temp_directory_path() / "ccf_bench"
                                     : std::filesystem::path(work_dir);
  config.seed = seed;
  config.row_groups = row_groups;

  const ccf::bench::BenchReport report = ccf::bench::run_experiment(config);
  std::cout << ccf::bench::records_to_csv(report.records);

  if (check) {
    const std::vector<std::string> violations = ccf::bench::check_laws(report, config);
    for (const std::string& v : violations) std::cerr << "check failed: " << v << "\n";
    if (!violations.empty()) return kExitBenchCheck;
    std::cerr << "all checks passed\n";
  }
  return kExitOk;
}

std::atomic<bool> g_shutdown{false};

int cmd_kms_serve(const std::string& bind, int port, const std::string& admin_token) {
  auto store = std::make_shared<ccf::KmsKeyStore>(admin_token);
  ccf::KmsHttpServer server(store, bind, port);
  std::cerr << "kms listening on " << server.base_url() << "\n";

  std::signal(SIGINT, [](int) { g_shutdown.store(true); });
  std::signal(SIGTERM, [](int) { g_shutdown.store(true); });
  while (!g_shutdown.load()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  server.stop();
  return kExitOk;
}

int run(int argc, char** argv) {
  CLI::App app{"columnar EMR files with envelope encryption"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate synthetic EMR tables");
  uint32_t patients = 1000;
  uint64_t seed = 1;
  std::string out_dir;
  std::string bias;
  uint32_t batch_days = 0;
  bool encrypt = false;
  std::string mode = "double";
  uint32_t row_groups = 1;
  KmsFlags gen_kms;
  std::string admin_token = "admin";
  gen->add_option("--patients", patients, "number of patients")->required();
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--out", out_dir, "output directory")->required();
  gen->add_option("--bias", bias, "condition bias name=weight[,...]");
  gen->add_option("--batch-days", batch_days, "partition into daily batches");
  gen->add_option("--row-groups", row_groups, "row groups per file")->check(CLI::PositiveNumber);
  gen->add_flag("--encrypt", encrypt, "encrypt outputs (needs --kms)");
  gen->add_option("--mode", mode, "wrap mode")->check(CLI::IsMember({"single", "double"}));
  add_kms_flags(*gen, gen_kms, false);
  gen->add_option("--admin-token", admin_token, "KMS admin token for key auto-creation");

  // read
  auto* read = app.add_subcommand("read", "print file contents as CSV");
  std::string read_file;
  std::string read_columns;
  KmsFlags read_kms;
  read->add_option("file", read_file, "input file")->required();
  read->add_option("--columns", read_columns, "comma-separated projection (default: all)");
  add_kms_flags(*read, read_kms, false);

  // query
  auto* query = app.add_subcommand("query", "run the misuse query");
  std::string data_dir;
  std::string drug = "Amoxicillin";
  std::string exclude;
  int64_t window_days = 2;
  std::string query_out = "result.ccf";
  std::string query_mode = "double";
  KmsFlags query_kms;
  std::string query_admin = "admin";
  query->add_option("--data", data_dir, "directory with table files")->required();
  query->add_option("--drug", drug, "prescription drug name");
  query->add_option("--exclude", exclude, "semicolon-separated conditions");
  query->add_option("--window-days", window_days, "window extension days")
      ->check(CLI::NonNegativeNumber);
  query->add_option("--out", query_out, "result file path");
  query->add_option("--mode", query_mode, "wrap mode for the result file")
      ->check(CLI::IsMember({"single", "double"}));
  add_kms_flags(*query, query_kms, false);
  query->add_option("--admin-token", query_admin, "KMS admin token for result keys");

  // bench
  auto* bench = app.add_subcommand("bench", "run the evaluation harness");
  std::string sizes = "1k";
  std::string modes = "plain,single,double";
  int64_t rtt_ms = 50;
  uint32_t reps = 3;
  std::string csv_path;
  bool check = false;
  std::string work_dir;
  uint64_t bench_seed = 42;
  int64_t bench_ttl = 600;
  uint32_t bench_row_groups = 4;
  bench->add_option("--sizes", sizes, "patient counts, e.g. 1k,5k,10000");
  bench->add_option("--modes", modes, "subset of plain,single,double");
  bench->add_option("--rtt-ms", rtt_ms, "injected KMS round-trip time")
      ->check(CLI::NonNegativeNumber);
  bench->add_option("--reps", reps, "measured repetitions per cell")->check(CLI::PositiveNumber);
  bench->add_option("--csv", csv_path, "write records to this CSV file");
  bench->add_flag("--check", check, "enforce bound/ordering laws (exit 5 on failure)");
  bench->add_option("--work-dir", work_dir, "dataset scratch directory");
  bench->add_option("--seed", bench_seed, "dataset seed");
  bench->add_option("--ttl", bench_ttl, "KEK cache TTL seconds")->check(CLI::NonNegativeNumber);
  bench->add_option("--row-groups", bench_row_groups, "row groups per input file")
      ->check(CLI::PositiveNumber);

  // kms
  auto* kms = app.add_subcommand("kms", "KMS server and key administration");
  kms->require_subcommand(1);
  auto* serve = kms->add_subcommand("serve", "run the HTTP KMS");
  std::string bind = "127.0.0.1";
  int port = 8088;
  std::string serve_admin = "admin";
  serve->add_option("--bind", bind, "bind address");
  serve->add_option("--port", port, "port (0 = ephemeral, printed on stderr)")
      ->check(CLI::Range(0, 65535));
  serve->add_option("--admin-token", serve_admin, "admin bearer token")->required();

  auto* keygen = kms->add_subcommand("keygen", "create a master key");
  std::string keygen_url;
  std::string keygen_id;
  std::string keygen_allow;
  std::string keygen_admin;
  keygen->add_option("--kms", keygen_url, "KMS base URL")->required();
  keygen->add_option("--key-id", keygen_id, "master key id")->required();
  keygen->add_option("--allow", keygen_allow, "comma-separated allowed tokens")->required();
  keygen->add_option("--admin-token", keygen_admin, "admin bearer token")->required();

  auto* revoke = kms->add_subcommand("revoke", "revoke a token's access to a key");
  std::string revoke_url;
  std::string revoke_id;
  std::string revoke_token;
  std::string revoke_admin;
  revoke->add_option("--kms", revoke_url, "KMS base URL")->required();
  revoke->add_option("--key-id", revoke_id, "master key id")->required();
  revoke->add_option("--token", revoke_token, "token to revoke")->required();
  revoke->add_option("--admin-token", revoke_admin, "admin bearer token")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  if (gen->parsed()) {
    if (encrypt && gen_kms.url.empty()) {
      std::cerr << "gen: --encrypt requires --kms\nRun with --help for usage.\n";
      return kExitUsage;
    }
    return cmd_gen(patients, seed, out_dir, bias,
                   batch_days ? std::optional<uint32_t>(batch_days) : std::nullopt, encrypt, mode,
                   gen_kms, admin_token, row_groups);
  }
  if (read->parsed()) return cmd_read(read_file, read_columns, read_kms);
  if (query->parsed()) {
    return cmd_query(data_dir, drug, exclude, window_days, query_out, query_kms, query_mode,
                     query_admin);
  }
  if (bench->parsed()) {
    return cmd_bench(sizes, modes, rtt_ms, reps, csv_path, check, work_dir, bench_seed, bench_ttl,
                     bench_row_groups);
  }
  if (serve->parsed()) return cmd_kms_serve(bind, port, serve_admin);
  if (keygen->parsed()) {
    std::set<std::string> allow;
    for (const std::string& t : split_list(keygen_allow, ',')) allow.insert(t);
    ccf::http_create_master_key(keygen_url, keygen_admin, keygen_id, allow);
    std::cerr << "created " << keygen_id << "\n";
    return kExitOk;
  }
  if (revoke->parsed()) {
    ccf::http_revoke_access(revoke_url, revoke_admin, revoke_id, revoke_token);
    std::cerr << "revoked " << revoke_token << " from " << revoke_id << "\n";
    return kExitOk;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ccf::AccessDenied& e) {
    std::cerr << "access denied: " << e.what() << "\n";
    return kExitAccessDenied;
  } catch (const ccf::IntegrityError& e) {
    std::cerr << "integrity failure: " << e.what() << "\n";
    return kExitIntegrity;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
