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

#include <doctest.h>

#include <filesystem>
#include <random>

#include "ccf/footer.hpp"
#include "ccf/reader.hpp"
#include "ccf/writer.hpp"
#include "test_util.hpp"

using namespace ccf;

namespace {

/// Reads every column back and compares against the source row groups.
void check_round_trip(const Table& t, const Bytes& file, KeyResolver* resolver) {
  const MemorySource source(file);
  const FileFooter footer = read_footer(source, resolver);
  CHECK(footer.schema == t.schema);

  std::vector<std::string> all;
  for (const auto& c : t.schema.columns) all.push_back(c.name);
  const auto groups = read_columns(source, footer, all, resolver);
  REQUIRE(groups.size() == t.row_groups.size());
  for (size_t g = 0; g < groups.size(); ++g) {
    CHECK(groups[g].columns == t.row_groups[g]);
    CHECK(groups[g].num_rows == (t.row_groups[g].empty() ? 0 : t.row_groups[g][0].size()));
  }
}

}  // namespace

TEST_CASE("plaintext files carry the CCF1 magic fore and aft") {
  std::mt19937_64 rng(1);
  const Table t = test::random_table(rng, 10, 1);
  Bytes file;
  (void)write_table(t.schema, t.row_groups, std::nullopt, file);
  REQUIRE(file.size() > 8);
  CHECK(std::string(file.begin(), file.begin() + 4) == "CCF1");
  CHECK(std::string(file.end() - 4, file.end()) == "CCF1");
}

TEST_CASE("encrypted files carry the CCFE magic and expose no plaintext schema") {
  std::mt19937_64 rng(2);
  const Table t = test::random_table(rng, 50, 2);
  test::Kms kms;
  auto cache = std::make_shared<KekCache>();

  Bytes file;
  (void)write_table(t.schema, t.row_groups,
                    test::one_key_encryption(t.schema, WrapMode::Double, kms.client, cache), file);
  CHECK(std::string(file.begin(), file.begin() + 4) == "CCFE");
  CHECK(std::string(file.end() - 4, file.end()) == "CCFE");

  // Column names and values must not appear in the clear.
  const std::string raw(file.begin(), file.end());
  CHECK(raw.find("names") == std::string::npos);
  CHECK(raw.find("table_name") == std::string::npos);
  // The plaintext key-material region must: it tells readers which key to ask for.
  CHECK(raw.find("masterKeyID") != std::string::npos);
}

TEST_CASE("round-trip property across modes, sizes, and row groups") {
  std::mt19937_64 rng(42);
  test::Kms kms;

  for (const size_t rows : {0u, 1u, 37u, 1000u, 10'000u}) {
    const Table t = test::random_table(rng, rows);

    // Plaintext.
    Bytes plain;
    (void)write_table(t.schema, t.row_groups, std::nullopt, plain);
    check_round_trip(t, plain, nullptr);

    // Encrypted, both wrap modes, fresh caches per mode.
    for (const WrapMode mode : {WrapMode::Single, WrapMode::Double}) {
      auto cache = std::make_shared<KekCache>();
      Bytes enc;
      (void)write_table(t.schema, t.row_groups,
                        test::one_key_encryption(t.schema, mode, kms.client, cache), enc);
      KeyResolver resolver(kms.client, cache);
      check_round_trip(t, enc, &resolver);
    }
  }
}

TEST_CASE("parallel kernels produce files the serial reader round-trips") {
  std::mt19937_64 rng(5);
  const Table t = test::random_table(rng, 5000, 3);
  test::Kms kms;
  auto cache = std::make_shared<KekCache>();

  WriteOptions opts;
  opts.parallel = true;
  Bytes enc;
  (void)write_table(t.schema, t.row_groups,
                    test::one_key_encryption(t.schema, WrapMode::Double, kms.client, cache), enc,
                    opts);
  KeyResolver resolver(kms.client, cache);
  check_round_trip(t, enc, &resolver);

  // And the parallel reader agrees with the serial one.
  const MemorySource source(enc);
  const FileFooter footer = read_footer(source, &resolver);
  ReadOptions ropts;
  ropts.parallel = true;
  const auto serial = read_columns(source, footer, {"ints", "names"}, &resolver);
  const auto parallel = read_columns(source, footer, {"ints", "names"}, &resolver, ropts);
  REQUIRE(serial.size() == parallel.size());
  for (size_t g = 0; g < serial.size(); ++g) CHECK(serial[g].columns == parallel[g].columns);
}

TEST_CASE("plaintext writes are deterministic given a pinned file id") {
  std::mt19937_64 rng(6);
  const Table t = test::random_table(rng, 100, 2);
  WriteOptions opts;
  opts.file_id = crypto::FileId{};
  opts.file_id->fill(0x5A);

  Bytes a, b;
  (void)write_table(t.schema, t.row_groups, std::nullopt, a, opts);
  (void)write_table(t.schema, t.row_groups, std::nullopt, b, opts);
  CHECK(a == b);
}

TEST_CASE("column pruning resolves only projected chunks") {
  std::mt19937_64 rng(7);
  const size_t row_groups = 4;
  const Table t = test::random_table(rng, 2000, row_groups);
  test::Kms kms;
  auto cache = std::make_shared<KekCache>();

  Bytes enc;
  (void)write_table(t.schema, t.row_groups,
                    test::one_key_encryption(t.schema, WrapMode::Double, kms.client, cache), enc);

  const MemorySource source(enc);
  for (const std::vector<std::string>& projection :
       {std::vector<std::string>{}, {"ints"}, {"ints", "flags"},
        {"ints", "reals", "names", "flags", "stamps"}}) {
    KeyResolver resolver(kms.client, std::make_shared<KekCache>());
    const FileFooter footer = read_footer(source, &resolver);
    const auto groups = read_columns(source, footer, projection, &resolver);
    // One resolution for the footer, one per projected chunk per row group.
    CHECK(resolver.resolutions() == 1 + projection.size() * row_groups);
    // Row counts survive even with nothing projected.
    REQUIRE(groups.size() == row_groups);
    for (size_t g = 0; g < row_groups; ++g) {
      CHECK(groups[g].num_rows == t.row_groups[g][0].size());
      CHECK(groups[g].columns.size() == projection.size());
    }
  }
}

TEST_CASE("unknown projection column raises ProjectionError") {
  std::mt19937_64 rng(8);
  const Table t = test::random_table(rng, 10, 1);
  Bytes file;
  (void)write_table(t.schema, t.row_groups, std::nullopt, file);
  const MemorySource source(file);
  const FileFooter footer = read_footer(source);
  CHECK_THROWS_AS((void)read_columns(source, footer, {"no_such"}, nullptr), ProjectionError);
}

TEST_CASE("every single-byte corruption of an encrypted file is caught or harmless") {
  // Small table so the scan over all byte positions stays fast.
  std::mt19937_64 rng(9);
  const Table t = test::random_table(rng, 4, 1);
  test::Kms kms;
  auto cache = std::make_shared<KekCache>();

  Bytes enc;
  const FileFooter written = write_table(
      t.schema, t.row_groups,
      test::one_key_encryption(t.schema, WrapMode::Double, kms.client, cache), enc);

  // AEAD-protected ranges: every chunk blob plus the encrypted footer blob.
  std::vector<bool> protected_byte(enc.size(), false);
  for (const auto& rg : written.row_groups) {
    for (const auto& chunk : rg.chunks) {
      for (uint64_t i = 0; i < chunk.length; ++i) protected_byte[chunk.offset + i] = true;
    }
  }
  const uint32_t footer_len = get_u32_le(enc.data() + enc.size() - 8);
  for (uint64_t i = enc.size() - 12 - footer_len; i < enc.size() - 12; ++i) {
    protected_byte[i] = true;
  }

  std::vector<std::string> all;
  for (const auto& c : t.schema.columns) all.push_back(c.name);

  for (size_t i = 0; i < enc.size(); ++i) {
    Bytes mutated = enc;
    mutated[i] ^= 0x01;
    KeyResolver resolver(kms.client, cache);
    bool integrity_error = false;
    bool any_error = false;
    try {
      const MemorySource source(mutated);
      const FileFooter footer = read_footer(source, &resolver);
      const auto groups = read_columns(source, footer, all, &resolver);
      // A flip that slips through (key-material metadata the AEAD does not
      // cover, like the cache-only kekID) must still yield the exact
      // original rows — never silently different data.
      for (size_t g = 0; g < groups.size(); ++g) CHECK(groups[g].columns == t.row_groups[g]);
    } catch (const IntegrityError&) {
      integrity_error = true;
      any_error = true;
    } catch (const Error&) {
      any_error = true;
    }
    INFO("byte index ", i);
    if (protected_byte[i]) {
      // Flips inside AEAD-covered bytes are always tag failures.
      CHECK(integrity_error);
    } else if (!any_error) {
      // Tolerated only outside the protected regions (see above).
      CHECK_FALSE(protected_byte[i]);
    }
  }
}

TEST_CASE("chunk and footer mutations specifically raise IntegrityError") {
  std::mt19937_64 rng(10);
  const Table t = test::random_table(rng, 16, 1);
  test::Kms kms;
  auto cache = std::make_shared<KekCache>();

  Bytes enc;
  const FileFooter footer = write_table(
      t.schema, t.row_groups, test::one_key_encryption(t.schema, WrapMode::Single, kms.client,
                                                       cache), enc);

  std::vector<std::string> all;
  for (const auto& c : t.schema.columns) all.push_back(c.name);

  // Chunk region: pick the middle byte of the first chunk.
  {
    const auto& meta = footer.row_groups[0].chunks[0];
    Bytes mutated = enc;
    mutated[meta.offset + meta.length / 2] ^= 0x40;
    const MemorySource source(mutated);
    KeyResolver resolver(kms.client, cache);
    const FileFooter f = read_footer(source, &resolver);
    CHECK_THROWS_AS((void)read_columns(source, f, all, &resolver), IntegrityError);
  }

  // Footer region: the encrypted footer blob sits between the key-material
  // JSON and the trailing lengths; mutate a byte 20 back from the lengths.
  {
    Bytes mutated = enc;
    mutated[mutated.size() - 12 - 20] ^= 0x40;
    const MemorySource source(mutated);
    KeyResolver resolver(kms.client, cache);
    CHECK_THROWS_AS((void)read_footer(source, &resolver), IntegrityError);
  }
}

TEST_CASE("chunks cannot be transplanted between ordinals") {
  // Two columns of identical shape: swap their chunk bytes and watch the
  // AAD binding reject both.
  TableSchema schema;
  schema.table_name = "swap";
  schema.columns = {{"a", ColumnType::Int64, false}, {"b", ColumnType::Int64, false}};
  ColumnVector a(ColumnType::Int64), b(ColumnType::Int64);
  for (int i = 0; i < 8; ++i) {
    a.append_int64(i);
    b.append_int64(100 + i);
  }
  test::Kms kms;
  auto cache = std::make_shared<KekCache>();
  EncryptionConfig enc_cfg = test::one_key_encryption(schema, WrapMode::Double, kms.client, cache);

  Bytes enc;
  const FileFooter footer = write_table(schema, {{a, b}}, enc_cfg, enc);
  const auto& ca = footer.row_groups[0].chunks[0];
  const auto& cb = footer.row_groups[0].chunks[1];
  REQUIRE(ca.length == cb.length);  // same shape -> same ciphertext length

  Bytes swapped = enc;
  std::copy_n(enc.begin() + static_cast<ptrdiff_t>(cb.offset), cb.length,
              swapped.begin() + static_cast<ptrdiff_t>(ca.offset));
  std::copy_n(enc.begin() + static_cast<ptrdiff_t>(ca.offset), ca.length,
              swapped.begin() + static_cast<ptrdiff_t>(cb.offset));

  const MemorySource source(swapped);
  KeyResolver resolver(kms.client, cache);
  const FileFooter f = read_footer(source, &resolver);
  CHECK_THROWS_AS((void)read_columns(source, f, {"a"}, &resolver), IntegrityError);
  CHECK_THROWS_AS((void)read_columns(source, f, {"b"}, &resolver), IntegrityError);
}

TEST_CASE("chunks cannot be transplanted between files") {
  // Same table written twice (fresh file ids): planting file B's chunk into
  // file A at the same coordinates must fail the file-id AAD binding.
  std::mt19937_64 rng(11);
  Table t = test::random_table(rng, 8, 1);
  test::Kms kms;
  auto cache = std::make_shared<KekCache>();
  EncryptionConfig cfg = test::one_key_encryption(t.schema, WrapMode::Double, kms.client, cache);

  Bytes file_a, file_b;
  const FileFooter fa = write_table(t.schema, t.row_groups, cfg, file_a);
  const FileFooter fb = write_table(t.schema, t.row_groups, cfg, file_b);
  const auto& ma = fa.row_groups[0].chunks[0];
  const auto& mb = fb.row_groups[0].chunks[0];
  REQUIRE(ma.length == mb.length);

  Bytes planted = file_a;
  std::copy_n(file_b.begin() + static_cast<ptrdiff_t>(mb.offset), mb.length,
              planted.begin() + static_cast<ptrdiff_t>(ma.offset));

  // The transplanted chunk travels with its own key material, so hand the
  // reader file B's material for that chunk by patching... no: metadata
  // lives in A's footer, which still references A's DEK. Decryption uses
  // A's DEK and A's AAD against B's ciphertext: tag mismatch.
  const MemorySource source(planted);
  KeyResolver resolver(kms.client, cache);
  const FileFooter f = read_footer(source, &resolver);
  CHECK_THROWS_AS((void)read_columns(source, f, {t.schema.columns[0].name}, &resolver),
                  IntegrityError);
}

TEST_CASE("plaintext structural damage is caught") {
  std::mt19937_64 rng(12);
  const Table t = test::random_table(rng, 10, 1);
  Bytes file;
  (void)write_table(t.schema, t.row_groups, std::nullopt, file);

  SUBCASE("bad magic") {
    Bytes bad = file;
    bad[0] = 'X';
    CHECK_THROWS_AS((void)read_footer(MemorySource(bad)), NotAColumnarFile);
  }
  SUBCASE("truncated") {
    const Bytes bad(file.begin(), file.begin() + 6);
    CHECK_THROWS_AS((void)read_footer(MemorySource(bad)), NotAColumnarFile);
  }
  SUBCASE("footer length field out of range") {
    Bytes bad = file;
    // footer_len sits at size-8; point it past the file start.
    bad[bad.size() - 8] = 0xFF;
    bad[bad.size() - 7] = 0xFF;
    bad[bad.size() - 6] = 0xFF;
    bad[bad.size() - 5] = 0x7F;
    CHECK_THROWS_AS((void)read_footer(MemorySource(bad)), DecodingError);
  }
}

TEST_CASE("footer codec round-trips and validates") {
  std::mt19937_64 rng(13);
  const Table t = test::random_table(rng, 10, 2);
  Bytes file;
  const FileFooter footer = write_table(t.schema, t.row_groups, std::nullopt, file);

  const std::string encoded = encode_footer(footer);
  const FileFooter back = decode_footer(encoded);
  CHECK(back.schema == footer.schema);
  CHECK(back.file_id == footer.file_id);
  CHECK(back.created_by == footer.created_by);
  REQUIRE(back.row_groups.size() == footer.row_groups.size());
  for (size_t g = 0; g < back.row_groups.size(); ++g) {
    CHECK(back.row_groups[g].num_rows == footer.row_groups[g].num_rows);
    CHECK(back.row_groups[g].chunks.size() == footer.row_groups[g].chunks.size());
  }

  CHECK_THROWS_AS((void)decode_footer("not json"), DecodingError);
  CHECK_THROWS_AS((void)decode_footer("{}"), DecodingError);
}

TEST_CASE("writer validates schema against row groups") {
  TableSchema schema;
  schema.table_name = "v";
  schema.columns = {{"a", ColumnType::Int64, false}};
  Bytes sink;

  // Wrong column count.
  CHECK_THROWS_AS((void)write_table(schema, {RowGroup{}}, std::nullopt, sink), SchemaError);

  // Wrong type.
  CHECK_THROWS_AS((void)write_table(schema, {{ColumnVector(ColumnType::Bool)}}, std::nullopt,
                                    sink),
                  SchemaError);

  // Null in a non-nullable column.
  ColumnVector with_null(ColumnType::Int64);
  with_null.append_null();
  CHECK_THROWS_AS((void)write_table(schema, {{with_null}}, std::nullopt, sink), SchemaError);

  // Encryption config must reference real columns and carry a footer key.
  test::Kms kms;
  auto cache = std::make_shared<KekCache>();
  EncryptionConfig cfg;
  cfg.mode = WrapMode::Double;
  cfg.kms = kms.client;
  cfg.cache = cache;
  ColumnVector ok(ColumnType::Int64);
  ok.append_int64(1);
  cfg.column_keys["a"] = "k1";
  CHECK_THROWS_AS((void)write_table(schema, {{ok}}, cfg, sink), SchemaError);  // no footer key
  cfg.footer_key_id = "k1";
  cfg.column_keys["ghost"] = "k1";  // unknown column named in the key map
  CHECK_THROWS_AS((void)write_table(schema, {{ok}}, cfg, sink), SchemaError);
}

TEST_CASE("columns without a key stay plaintext inside an encrypted file") {
  TableSchema schema;
  schema.table_name = "mixed";
  schema.columns = {{"secret", ColumnType::String, false}, {"open", ColumnType::Int64, false}};
  ColumnVector secret(ColumnType::String), open(ColumnType::Int64);
  for (int i = 0; i < 10; ++i) {
    secret.append_string("classified-" + std::to_string(i));
    open.append_int64(i);
  }

  test::Kms kms;
  auto cache = std::make_shared<KekCache>();
  EncryptionConfig cfg;
  cfg.footer_key_id = "k1";
  cfg.column_keys["secret"] = "k1";  // 'open' is deliberately not keyed
  cfg.mode = WrapMode::Double;
  cfg.kms = kms.client;
  cfg.cache = cache;

  Bytes file;
  const FileFooter footer = write_table(schema, {{secret, open}}, cfg, file);
  CHECK(footer.row_groups[0].chunks[0].encrypted);
  CHECK_FALSE(footer.row_groups[0].chunks[1].encrypted);

  const std::string raw(file.begin(), file.end());
  CHECK(raw.find("classified-3") == std::string::npos);  // encrypted column hidden

  KeyResolver resolver(kms.client, cache);
  const MemorySource source(file);
  const FileFooter f = read_footer(source, &resolver);
  const auto groups = read_columns(source, f, {"secret", "open"}, &resolver);
  CHECK(groups[0].columns[0] == secret);
  CHECK(groups[0].columns[1] == open);
}

TEST_CASE("write_table_file leaves no partial file behind on failure") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ccf_format_test";
  fs::create_directories(dir);
  const fs::path target = dir / "out.ccf";
  fs::remove(target);

  TableSchema schema;
  schema.table_name = "v";
  schema.columns = {{"a", ColumnType::Int64, false}};
  CHECK_THROWS_AS((void)write_table_file(schema, {RowGroup{}}, std::nullopt, target), SchemaError);
  CHECK_FALSE(fs::exists(target));
  for (const auto& e : fs::directory_iterator(dir)) {
    CHECK(e.path().filename().string().find(".tmp") == std::string::npos);
  }

  std::mt19937_64 rng(14);
  const Table t = test::random_table(rng, 5, 1);
  (void)write_table_file(t.schema, t.row_groups, std::nullopt, target);
  CHECK(fs::exists(target));
  check_round_trip(t, [&] {
    FileSource src(target);
    Bytes all(src.size());
    const Bytes got = src.read_at(0, all.size());
    return got;
  }(), nullptr);
  fs::remove_all(dir);
}
