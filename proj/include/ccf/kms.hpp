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
#include <set>
#include <string>

#include "ccf/bytes.hpp"

namespace ccf {

struct KmsStats {
  uint64_t wrap_calls = 0;
  uint64_t unwrap_calls = 0;
  std::chrono::milliseconds total_injected_latency{0};
};

/// Client-side view of a Key Management Service.  Implementations carry an
/// auth token; master keys never leave the service.  All public entry
/// points count into stats() and are safe for concurrent use.
class KmsClient {
 public:
  virtual ~KmsClient() = default;

  /// Wraps 16 key bytes under the master key `key_id`; returns base64.
  std::string wrap(const std::string& key_id, const Bytes& plaintext_key);

  /// Inverse of wrap.
  Bytes unwrap(const std::string& key_id, const std::string& wrapped_b64);

  KmsStats stats() const;
  void reset_stats();

 protected:
  virtual std::string do_wrap(const std::string& key_id, const Bytes& plaintext_key) = 0;
  virtual Bytes do_unwrap(const std::string& key_id, const std::string& wrapped_b64) = 0;

  void record_injected_latency(std::chrono::milliseconds d);

 private:
  std::atomic<uint64_t> wrap_calls_{0};
  std::atomic<uint64_t> unwrap_calls_{0};
  std::atomic<int64_t> injected_latency_ms_{0};
};

/// Server-side master key store with per-key token ACLs.  Master keys are
/// generated inside the store and are never exposed.
class KmsKeyStore {
 public:
  explicit KmsKeyStore(std::string admin_token);

  void create_master_key(const std::string& admin_token, const std::string& key_id,
                         std::set<std::string> allowed_tokens);
  void revoke_access(const std::string& admin_token, const std::string& key_id,
                     const std::string& token);

  std::string wrap(const std::string& token, const std::string& key_id, const Bytes& key);
  Bytes unwrap(const std::string& token, const std::string& key_id, const std::string& wrapped);

  bool has_key(const std::string& key_id) const;

 private:
  struct MasterKeyRecord {
    Bytes key;
    std::set<std::string> allowed_tokens;
  };

  const MasterKeyRecord& authorize(const std::string& token, const std::string& key_id) const;

  std::string admin_token_;
  mutable std::mutex mutex_;
  std::map<std::string, MasterKeyRecord> keys_;
};

/// In-process client bound to a store and a token.
class InMemoryKmsClient : public KmsClient {
 public:
  InMemoryKmsClient(std::shared_ptr<KmsKeyStore> store, std::string token);

 protected:
  std::string do_wrap(const std::string& key_id, const Bytes& plaintext_key) override;
  Bytes do_unwrap(const std::string& key_id, const std::string& wrapped_b64) override;

 private:
  std::shared_ptr<KmsKeyStore> store_;
  std::string token_;
};

/// Fixed round-trip-time injection in front of another client, simulating a
/// KMS deployed remotely from the compute.
class LatencyInjectingKmsClient : public KmsClient {
 public:
  LatencyInjectingKmsClient(std::shared_ptr<KmsClient> inner, std::chrono::milliseconds rtt);

 protected:
  std::string do_wrap(const std::string& key_id, const Bytes& plaintext_key) override;
  Bytes do_unwrap(const std::string& key_id, const std::string& wrapped_b64) override;

 private:
  void inject();

  std::shared_ptr<KmsClient> inner_;
  std::chrono::milliseconds rtt_;
};

std::shared_ptr<KmsClient> with_latency(std::shared_ptr<KmsClient> inner,
                                        std::chrono::milliseconds rtt);

/// HTTP client speaking the wire protocol of KmsHttpServer:
///   POST {base}/v1/keys/{key_id}/wrap    {"plaintext": b64} -> {"wrapped": b64}
///   POST {base}/v1/keys/{key_id}/unwrap  {"wrapped": b64}   -> {"plaintext": b64}
/// with "Authorization: Bearer <token>"; 403 -> AccessDenied, 404 ->
/// UnknownKey, transport failure -> KmsUnavailable.
class HttpKmsClient : public KmsClient {
 public:
  HttpKmsClient(std::string base_url, std::string token);

 protected:
  std::string do_wrap(const std::string& key_id, const Bytes& plaintext_key) override;
  Bytes do_unwrap(const std::string& key_id, const std::string& wrapped_b64) override;

 private:
  std::string post(const std::string& path, const std::string& body);

  std::string base_url_;
  std::string token_;
};

std::shared_ptr<KmsClient> http_client(const std::string& base_url, const std::string& token);

/// Admin operations over the same wire protocol (PUT /v1/keys/{key_id} and
/// DELETE /v1/keys/{key_id}/tokens/{token}).
void http_create_master_key(const std::string& base_url, const std::string& admin_token,
                            const std::string& key_id, const std::set<std::string>& allowed_tokens);
void http_revoke_access(const std::string& base_url, const std::string& admin_token,
                        const std::string& key_id, const std::string& token);

}  // namespace ccf
