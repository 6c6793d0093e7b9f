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

#include "ccf/keytools.hpp"

#include "ccf/crypto.hpp"
#include "ccf/errors.hpp"

namespace ccf {

KekCache::KekCache(std::chrono::milliseconds ttl) : ttl_(ttl) {}

std::optional<KekCache::WriteKek> KekCache::find_write_kek(const std::string& master_key_id) {
  std::lock_guard lock(mutex_);
  const auto it = write_side_.find(master_key_id);
  if (it == write_side_.end()) return std::nullopt;
  if (Clock::now() >= it->second.expires_at) {
    write_side_.erase(it);
    return std::nullopt;
  }
  return it->second.kek;
}

KekCache::WriteKek KekCache::put_write_kek(const std::string& master_key_id, WriteKek kek) {
  std::lock_guard lock(mutex_);
  const auto now = Clock::now();
  auto it = write_side_.find(master_key_id);
  if (it != write_side_.end() && now < it->second.expires_at) {
    // Lost a cold-cache race; keep the incumbent so the process holds at
    // most one live KEK per master key.
    return it->second.kek;
  }
  WriteEntry entry{std::move(kek), now + ttl_};
  auto result = entry.kek;
  write_side_[master_key_id] = std::move(entry);
  return result;
}

std::optional<Bytes> KekCache::find_read_kek(const std::string& master_key_id,
                                             const std::string& kek_id_b64) {
  std::lock_guard lock(mutex_);
  const auto it = read_side_.find({master_key_id, kek_id_b64});
  if (it == read_side_.end()) return std::nullopt;
  if (Clock::now() >= it->second.expires_at) {
    read_side_.erase(it);
    return std::nullopt;
  }
  return it->second.kek;
}

void KekCache::put_read_kek(const std::string& master_key_id, const std::string& kek_id_b64,
                            Bytes kek) {
  std::lock_guard lock(mutex_);
  read_side_[{master_key_id, kek_id_b64}] = ReadEntry{std::move(kek), Clock::now() + ttl_};
}

std::optional<Bytes> KekCache::find_read_dek(const std::string& master_key_id,
                                             const std::string& wrapped_dek_b64) {
  std::lock_guard lock(mutex_);
  const auto it = dek_side_.find({master_key_id, wrapped_dek_b64});
  if (it == dek_side_.end()) return std::nullopt;
  if (Clock::now() >= it->second.expires_at) {
    dek_side_.erase(it);
    return std::nullopt;
  }
  return it->second.kek;
}

void KekCache::put_read_dek(const std::string& master_key_id, const std::string& wrapped_dek_b64,
                            Bytes dek) {
  std::lock_guard lock(mutex_);
  dek_side_[{master_key_id, wrapped_dek_b64}] = ReadEntry{std::move(dek), Clock::now() + ttl_};
}

void KekCache::invalidate_master_key(const std::string& master_key_id) {
  std::lock_guard lock(mutex_);
  write_side_.erase(master_key_id);
  for (auto* side : {&read_side_, &dek_side_}) {
    for (auto it = side->begin(); it != side->end();) {
      it = it->first.first == master_key_id ? side->erase(it) : std::next(it);
    }
  }
}

size_t KekCache::live_entries() {
  std::lock_guard lock(mutex_);
  const auto now = Clock::now();
  size_t n = 0;
  for (const auto& [_, e] : write_side_) n += now < e.expires_at;
  for (const auto& [_, e] : read_side_) n += now < e.expires_at;
  for (const auto& [_, e] : dek_side_) n += now < e.expires_at;
  return n;
}

DekWithMaterial create_dek_for_write(const std::string& master_key_id, bool is_footer,
                                     WrapMode mode, KmsClient& kms, KekCache& cache) {
  DekWithMaterial out;
  out.dek = crypto::generate_key();
  out.material.is_footer_key = is_footer;
  out.material.master_key_id = master_key_id;

  if (mode == WrapMode::Single) {
    out.material.double_wrapping = false;
    try {
      out.material.wrapped_dek = kms.wrap(master_key_id, out.dek);
    } catch (const AccessDenied&) {
      cache.invalidate_master_key(master_key_id);
      throw;
    }
    return out;
  }

  auto kek = cache.find_write_kek(master_key_id);
  if (!kek) {
    KekCache::WriteKek fresh;
    fresh.kek = crypto::generate_key();
    fresh.kek_id = crypto::random_bytes(crypto::kKeyLen);
    try {
      fresh.wrapped_kek = kms.wrap(master_key_id, fresh.kek);
    } catch (const AccessDenied&) {
      cache.invalidate_master_key(master_key_id);
      throw;
    }
    kek = cache.put_write_kek(master_key_id, std::move(fresh));
  }

  out.material.double_wrapping = true;
  out.material.kek_id = base64_encode(kek->kek_id);
  out.material.wrapped_kek = kek->wrapped_kek;
  out.material.wrapped_dek = crypto::wrap_key(kek->kek, out.dek);
  return out;
}

Bytes unwrap_dek(const KeyMaterial& km, KmsClient& kms, KekCache& cache) {
  if (km.key_material_type != "CKM1") {
    throw MalformedKeyMaterial("unsupported key material type");
  }

  if (!km.double_wrapping) {
    if (km.kek_id || km.wrapped_kek) {
      throw MalformedKeyMaterial("single-wrapped material must not carry KEK fields");
    }
    if (auto dek = cache.find_read_dek(km.master_key_id, km.wrapped_dek)) return *dek;
    Bytes dek;
    try {
      dek = kms.unwrap(km.master_key_id, km.wrapped_dek);
    } catch (const AccessDenied&) {
      cache.invalidate_master_key(km.master_key_id);
      throw;
    }
    if (dek.size() != crypto::kKeyLen) throw MalformedKeyMaterial("unwrapped DEK has bad length");
    cache.put_read_dek(km.master_key_id, km.wrapped_dek, dek);
    return dek;
  }

  if (!km.kek_id || !km.wrapped_kek) {
    throw MalformedKeyMaterial("double-wrapped material missing KEK fields");
  }

  std::optional<Bytes> kek = cache.find_read_kek(km.master_key_id, *km.kek_id);
  if (!kek) {
    try {
      kek = kms.unwrap(km.master_key_id, *km.wrapped_kek);
    } catch (const AccessDenied&) {
      cache.invalidate_master_key(km.master_key_id);
      throw;
    }
    if (kek->size() != crypto::kKeyLen) throw MalformedKeyMaterial("unwrapped KEK has bad length");
    cache.put_read_kek(km.master_key_id, *km.kek_id, *kek);
  }

  const Bytes dek = crypto::unwrap_key(*kek, km.wrapped_dek);
  if (dek.size() != crypto::kKeyLen) throw MalformedKeyMaterial("unwrapped DEK has bad length");
  return dek;
}

KeyResolver::KeyResolver(std::shared_ptr<KmsClient> kms, std::shared_ptr<KekCache> cache)
    : kms_(std::move(kms)), cache_(std::move(cache)) {}

Bytes KeyResolver::resolve(const KeyMaterial& km) {
  resolutions_.fetch_add(1, std::memory_order_relaxed);
  return unwrap_dek(km, *kms_, *cache_);
}

}  // namespace ccf
