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

#include <chrono>
#include <set>
#include <thread>

#include "ccf/errors.hpp"
#include "ccf/keytools.hpp"
#include "test_util.hpp"

using namespace ccf;
using namespace std::chrono_literals;

TEST_CASE("double wrapping pays one KMS call per master key, cold cache") {
  test::Kms kms({"mek-a", "mek-b", "mek-c"});
  KekCache cache;

  // 3 files x 4 chunks + footer, spread over 3 master keys.
  std::vector<DekWithMaterial> minted;
  for (int file = 0; file < 3; ++file) {
    for (int chunk = 0; chunk < 4; ++chunk) {
      const std::string mek = chunk < 2 ? "mek-a" : "mek-b";
      minted.push_back(create_dek_for_write(mek, false, WrapMode::Double, *kms.client, cache));
    }
    minted.push_back(create_dek_for_write("mek-c", true, WrapMode::Double, *kms.client, cache));
  }

  CHECK(kms.client->stats().wrap_calls == 3);  // one per master key
  CHECK(kms.client->stats().unwrap_calls == 0);

  // All DEKs distinct even though KEKs are shared.
  std::set<Bytes> deks;
  for (const auto& m : minted) deks.insert(m.dek);
  CHECK(deks.size() == minted.size());

  // Materials under one master key share the KEK id.
  std::set<std::string> keks_a;
  for (const auto& m : minted) {
    if (m.material.master_key_id == "mek-a") keks_a.insert(m.material.kek_id.value());
  }
  CHECK(keks_a.size() == 1);
}

TEST_CASE("single wrapping pays one KMS call per module") {
  test::Kms kms({"mek-a"});
  KekCache cache;
  for (int i = 0; i < 7; ++i) {
    const auto m = create_dek_for_write("mek-a", false, WrapMode::Single, *kms.client, cache);
    CHECK_FALSE(m.material.double_wrapping);
    CHECK_FALSE(m.material.kek_id.has_value());
    CHECK_FALSE(m.material.wrapped_kek.has_value());
  }
  CHECK(kms.client->stats().wrap_calls == 7);
}

TEST_CASE("write-path DEKs round-trip through unwrap in both modes") {
  test::Kms kms({"mek-a"});
  for (const WrapMode mode : {WrapMode::Single, WrapMode::Double}) {
    KekCache write_cache, read_cache;
    const auto minted = create_dek_for_write("mek-a", false, mode, *kms.client, write_cache);
    CHECK(minted.dek.size() == crypto::kKeyLen);
    CHECK(minted.material.double_wrapping == (mode == WrapMode::Double));
    // A fresh cache on the read side forces the full unwrap path.
    CHECK(unwrap_dek(minted.material, *kms.client, read_cache) == minted.dek);
    // Warm cache: same result.
    CHECK(unwrap_dek(minted.material, *kms.client, read_cache) == minted.dek);
  }
}

TEST_CASE("read-side caching collapses repeated unwraps to one KMS call") {
  test::Kms kms({"mek-a"});
  KekCache write_cache;

  for (const WrapMode mode : {WrapMode::Double, WrapMode::Single}) {
    const auto minted = create_dek_for_write("mek-a", false, mode, *kms.client, write_cache);
    KekCache read_cache;
    kms.client->reset_stats();
    for (int i = 0; i < 10; ++i) {
      (void)unwrap_dek(minted.material, *kms.client, read_cache);
    }
    CHECK(kms.client->stats().unwrap_calls == 1);
  }
}

TEST_CASE("ttl zero disables caching entirely") {
  test::Kms kms({"mek-a"});
  KekCache cache(0ms);
  for (int i = 0; i < 4; ++i) {
    (void)create_dek_for_write("mek-a", false, WrapMode::Double, *kms.client, cache);
  }
  CHECK(kms.client->stats().wrap_calls == 4);
  CHECK(cache.live_entries() == 0);
}

TEST_CASE("kms calls over a time window obey the ttl law") {
  // With ttl T, repeated access to one master key over wall time W costs at
  // most ceil(W/T) + 1 calls: one per expiry boundary crossed, plus the
  // initial fill.
  test::Kms kms({"mek-a"});
  const auto ttl = 80ms;
  KekCache cache(ttl);

  const auto t0 = KekCache::Clock::now();
  const auto window = 400ms;
  while (KekCache::Clock::now() - t0 < window) {
    (void)create_dek_for_write("mek-a", false, WrapMode::Double, *kms.client, cache);
    std::this_thread::sleep_for(5ms);
  }
  const auto elapsed = KekCache::Clock::now() - t0;
  const uint64_t budget =
      static_cast<uint64_t>((elapsed + ttl - 1ms) / ttl) + 1;  // ceil(W/T) + 1
  CHECK(kms.client->stats().wrap_calls <= budget);
  CHECK(kms.client->stats().wrap_calls >= 2);  // several windows elapsed
}

TEST_CASE("revocation takes effect at cache expiry for reads") {
  const auto ttl = 400ms;
  for (const WrapMode mode : {WrapMode::Single, WrapMode::Double}) {
    CAPTURE(wrap_mode_name(mode));
    test::Kms kms({"mek-a"});
    KekCache write_cache(ttl);
    const auto minted = create_dek_for_write("mek-a", false, mode, *kms.client, write_cache);

    KekCache read_cache(ttl);
    CHECK(unwrap_dek(minted.material, *kms.client, read_cache) == minted.dek);  // fills cache

    kms.store->revoke_access(kms.admin, "mek-a", kms.token);

    // Until expiry the cached entry still serves reads.
    CHECK(unwrap_dek(minted.material, *kms.client, read_cache) == minted.dek);

    std::this_thread::sleep_for(ttl + 100ms);
    CHECK_THROWS_AS((void)unwrap_dek(minted.material, *kms.client, read_cache), AccessDenied);
    // The denial purged the cache: still denied, and no stale reuse.
    CHECK_THROWS_AS((void)unwrap_dek(minted.material, *kms.client, read_cache), AccessDenied);
  }
}

TEST_CASE("revocation blocks new writers once the write kek expires") {
  test::Kms kms({"mek-a"});
  const auto ttl = 400ms;
  KekCache cache(ttl);
  (void)create_dek_for_write("mek-a", false, WrapMode::Double, *kms.client, cache);

  kms.store->revoke_access(kms.admin, "mek-a", kms.token);
  // Cached KEK still mints DEKs without contacting the KMS.
  (void)create_dek_for_write("mek-a", false, WrapMode::Double, *kms.client, cache);

  std::this_thread::sleep_for(ttl + 100ms);
  CHECK_THROWS_AS((void)create_dek_for_write("mek-a", false, WrapMode::Double, *kms.client, cache),
                  AccessDenied);
  CHECK(cache.live_entries() == 0);  // denial invalidated the master key
}

TEST_CASE("unwrap rejects materials that contradict their mode") {
  test::Kms kms({"mek-a"});
  KekCache cache;

  auto single = create_dek_for_write("mek-a", false, WrapMode::Single, *kms.client, cache);
  auto doubled = create_dek_for_write("mek-a", false, WrapMode::Double, *kms.client, cache);

  KeyMaterial bad_single = single.material;
  bad_single.double_wrapping = true;  // claims double but lacks KEK fields
  CHECK_THROWS_AS((void)unwrap_dek(bad_single, *kms.client, cache), MalformedKeyMaterial);

  KeyMaterial bad_double = doubled.material;
  bad_double.double_wrapping = false;  // claims single but carries KEK fields
  CHECK_THROWS_AS((void)unwrap_dek(bad_double, *kms.client, cache), MalformedKeyMaterial);
}

TEST_CASE("unwrap detects tampered wrapped keys") {
  test::Kms kms({"mek-a"});
  KekCache write_cache;
  const auto minted = create_dek_for_write("mek-a", false, WrapMode::Double, *kms.client,
                                           write_cache);

  KeyMaterial tampered = minted.material;
  // Flip one character of the locally wrapped DEK (stay in the alphabet).
  tampered.wrapped_dek[0] = tampered.wrapped_dek[0] == 'A' ? 'B' : 'A';
  KekCache read_cache;
  CHECK_THROWS_AS((void)unwrap_dek(tampered, *kms.client, read_cache), IntegrityError);
}

TEST_CASE("key resolver counts resolutions") {
  auto kms = std::make_shared<test::Kms>(std::vector<std::string>{"mek-a"});
  auto cache = std::make_shared<KekCache>();
  KeyResolver resolver(kms->client, cache);
  const auto minted = create_dek_for_write("mek-a", false, WrapMode::Double, *kms->client, *cache);
  CHECK(resolver.resolutions() == 0);
  CHECK(resolver.resolve(minted.material) == minted.dek);
  CHECK(resolver.resolve(minted.material) == minted.dek);
  CHECK(resolver.resolutions() == 2);
}
