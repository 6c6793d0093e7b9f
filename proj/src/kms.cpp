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

#include "ccf/kms.hpp"

#include <thread>

#include "ccf/crypto.hpp"
#include "ccf/errors.hpp"

namespace ccf {

// ── KmsClient ───────────────────────────────────────────────────────────

std::string KmsClient::wrap(const std::string& key_id, const Bytes& plaintext_key) {
  wrap_calls_.fetch_add(1, std::memory_order_relaxed);
  return do_wrap(key_id, plaintext_key);
}

Bytes KmsClient::unwrap(const std::string& key_id, const std::string& wrapped_b64) {
  unwrap_calls_.fetch_add(1, std::memory_order_relaxed);
  return do_unwrap(key_id, wrapped_b64);
}

KmsStats KmsClient::stats() const {
  return KmsStats{wrap_calls_.load(), unwrap_calls_.load(),
                  std::chrono::milliseconds(injected_latency_ms_.load())};
}

void KmsClient::reset_stats() {
  wrap_calls_ = 0;
  unwrap_calls_ = 0;
  injected_latency_ms_ = 0;
}

void KmsClient::record_injected_latency(std::chrono::milliseconds d) {
  injected_latency_ms_.fetch_add(d.count(), std::memory_order_relaxed);
}

// ── KmsKeyStore ─────────────────────────────────────────────────────────

KmsKeyStore::KmsKeyStore(std::string admin_token) : admin_token_(std::move(admin_token)) {}

void KmsKeyStore::create_master_key(const std::string& admin_token, const std::string& key_id,
                                    std::set<std::string> allowed_tokens) {
  if (admin_token != admin_token_) throw Unauthorized("admin token rejected");
  if (key_id.empty()) throw UnknownKey("empty key id");
  std::lock_guard lock(mutex_);
  if (keys_.count(key_id)) throw DuplicateKey("master key already exists: " + key_id);
  keys_.emplace(key_id, MasterKeyRecord{crypto::generate_key(), std::move(allowed_tokens)});
}

void KmsKeyStore::revoke_access(const std::string& admin_token, const std::string& key_id,
                                const std::string& token) {
  if (admin_token != admin_token_) throw Unauthorized("admin token rejected");
  std::lock_guard lock(mutex_);
  const auto it = keys_.find(key_id);
  if (it == keys_.end()) throw UnknownKey("unknown master key: " + key_id);
  it->second.allowed_tokens.erase(token);
}

const KmsKeyStore::MasterKeyRecord& KmsKeyStore::authorize(const std::string& token,
                                                           const std::string& key_id) const {
  // caller holds mutex_
  const auto it = keys_.find(key_id);
  if (it == keys_.end()) throw UnknownKey("unknown master key: " + key_id);
  if (!it->second.allowed_tokens.count(token)) {
    throw AccessDenied("token has no access to master key " + key_id);
  }
  return it->second;
}

std::string KmsKeyStore::wrap(const std::string& token, const std::string& key_id,
                              const Bytes& key) {
  Bytes master;
  {
    std::lock_guard lock(mutex_);
    master = authorize(token, key_id).key;
  }
  return crypto::wrap_key(master, key);
}

Bytes KmsKeyStore::unwrap(const std::string& token, const std::string& key_id,
                          const std::string& wrapped) {
  Bytes master;
  {
    std::lock_guard lock(mutex_);
    master = authorize(token, key_id).key;
  }
  return crypto::unwrap_key(master, wrapped);
}

bool KmsKeyStore::has_key(const std::string& key_id) const {
  std::lock_guard lock(mutex_);
  return keys_.count(key_id) > 0;
}

// ── InMemoryKmsClient ───────────────────────────────────────────────────

InMemoryKmsClient::InMemoryKmsClient(std::shared_ptr<KmsKeyStore> store, std::string token)
    : store_(std::move(store)), token_(std::move(token)) {}

std::string InMemoryKmsClient::do_wrap(const std::string& key_id, const Bytes& plaintext_key) {
  return store_->wrap(token_, key_id, plaintext_key);
}

Bytes InMemoryKmsClient::do_unwrap(const std::string& key_id, const std::string& wrapped_b64) {
  return store_->unwrap(token_, key_id, wrapped_b64);
}

// ── LatencyInjectingKmsClient ───────────────────────────────────────────

LatencyInjectingKmsClient::LatencyInjectingKmsClient(std::shared_ptr<KmsClient> inner,
                                                     std::chrono::milliseconds rtt)
    : inner_(std::move(inner)), rtt_(rtt) {}

void LatencyInjectingKmsClient::inject() {
  if (rtt_.count() > 0) std::this_thread::sleep_for(rtt_);
  record_injected_latency(rtt_);
}

std::string LatencyInjectingKmsClient::do_wrap(const std::string& key_id,
                                               const Bytes& plaintext_key) {
  inject();
  return inner_->wrap(key_id, plaintext_key);
}

Bytes LatencyInjectingKmsClient::do_unwrap(const std::string& key_id,
                                           const std::string& wrapped_b64) {
  inject();
  return inner_->unwrap(key_id, wrapped_b64);
}

std::shared_ptr<KmsClient> with_latency(std::shared_ptr<KmsClient> inner,
                                        std::chrono::milliseconds rtt) {
  return std::make_shared<LatencyInjectingKmsClient>(std::move(inner), rtt);
}

}  // namespace ccf
