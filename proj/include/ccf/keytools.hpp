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

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "ccf/bytes.hpp"
#include "ccf/key_material.hpp"
#include "ccf/kms.hpp"

namespace ccf {

inline constexpr std::chrono::milliseconds kDefaultKekTtl{600'000};  // 600 s

/// TTL-bounded key cache.  Write side holds at most one live KEK per master
/// key; read side is keyed by (master_key_id, kek_id) so KEKs minted by
/// several writer processes can coexist.  Single-wrapped DEKs resolved
/// through the KMS are cached too (keyed by their wrapped form), giving
/// both wrap modes the same contract: repeated access to one master key
/// costs at most ceil(W/ttl)+1 KMS calls over wall time W, and revocation
/// takes effect when the entry expires.  Expiry is checked at lookup
/// against a monotonic clock; an expired entry is never served, which is
/// what re-subjects callers to KMS authorization (and hence revocation).
class KekCache {
 public:
  using Clock = std::chrono::steady_clock;

  struct WriteKek {
    Bytes kek;
    Bytes kek_id;
    std::string wrapped_kek;  // base64, KMS-wrapped under the master key
  };

  explicit KekCache(std::chrono::milliseconds ttl = kDefaultKekTtl);

  std::chrono::milliseconds ttl() const { return ttl_; }

  /// Live write-side KEK for this master key, if any.
  std::optional<WriteKek> find_write_kek(const std::string& master_key_id);

  /// Installs a fresh write-side KEK unless a live one appeared in the
  /// meantime; returns the entry that ends up cached.
  WriteKek put_write_kek(const std::string& master_key_id, WriteKek kek);

  std::optional<Bytes> find_read_kek(const std::string& master_key_id,
                                     const std::string& kek_id_b64);
  void put_read_kek(const std::string& master_key_id, const std::string& kek_id_b64, Bytes kek);

  /// Read-side cache of single-wrapped DEKs, keyed by the wrapped form.
  std::optional<Bytes> find_read_dek(const std::string& master_key_id,
                                     const std::string& wrapped_dek_b64);
  void put_read_dek(const std::string& master_key_id, const std::string& wrapped_dek_b64,
                    Bytes dek);

  /// Drops every entry for the master key, both sides.  Called on
  /// AccessDenied so later requests re-contact the KMS immediately.
  void invalidate_master_key(const std::string& master_key_id);

  size_t live_entries();  // test/diagnostic helper

 private:
  struct WriteEntry {
    WriteKek kek;
    Clock::time_point expires_at;
  };
  struct ReadEntry {
    Bytes kek;
    Clock::time_point expires_at;
  };

  std::chrono::milliseconds ttl_;
  std::mutex mutex_;
  std::map<std::string, WriteEntry> write_side_;
  std::map<std::pair<std::string, std::string>, ReadEntry> read_side_;
  std::map<std::pair<std::string, std::string>, ReadEntry> dek_side_;
};

struct DekWithMaterial {
  Bytes dek;
  KeyMaterial material;
};

/// Mints the DEK for one module about to be written.
///
/// Single wrapping contacts the KMS on every call.  Double wrapping wraps
/// the DEK locally under a cached KEK and only contacts the KMS when no
/// live KEK exists for the master key.
DekWithMaterial create_dek_for_write(const std::string& master_key_id, bool is_footer,
                                     WrapMode mode, KmsClient& kms, KekCache& cache);

/// Recovers the DEK for one module being read; the mirror image of
/// create_dek_for_write.  Local unwrap failures throw IntegrityError; KMS
/// denials propagate as AccessDenied after invalidating the cache entry.
Bytes unwrap_dek(const KeyMaterial& km, KmsClient& kms, KekCache& cache);

/// Read-side bundle handed to file readers: KMS client + KEK cache, with a
/// counter of DEK resolutions for pruning tests and benchmarks.
class KeyResolver {
 public:
  KeyResolver(std::shared_ptr<KmsClient> kms, std::shared_ptr<KekCache> cache);

  Bytes resolve(const KeyMaterial& km);

  uint64_t resolutions() const { return resolutions_.load(); }
  KmsClient& kms() { return *kms_; }
  KekCache& cache() { return *cache_; }

 private:
  std::shared_ptr<KmsClient> kms_;
  std::shared_ptr<KekCache> cache_;
  std::atomic<uint64_t> resolutions_{0};
};

}  // namespace ccf
