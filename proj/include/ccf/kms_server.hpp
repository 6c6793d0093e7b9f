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

#include <memory>
#include <string>
#include <thread>

#include "ccf/kms.hpp"

namespace ccf {

/// HTTP front end for a KmsKeyStore.
///
/// Routes (JSON bodies, "Authorization: Bearer <token>"):
///   POST   /v1/keys/{key_id}/wrap            {"plaintext": b64} -> 200 {"wrapped": b64}
///   POST   /v1/keys/{key_id}/unwrap          {"wrapped": b64}   -> 200 {"plaintext": b64}
///   PUT    /v1/keys/{key_id}                 {"allowed_tokens": [..]}  (admin) -> 200
///   DELETE /v1/keys/{key_id}/tokens/{token}  (admin) -> 200
/// Errors: 403 {"error":"access denied"}, 404 {"error":"unknown key"},
/// 409 {"error":"duplicate key"}, 400 {"error": "..."}.
class KmsHttpServer {
 public:
  KmsHttpServer(std::shared_ptr<KmsKeyStore> store, const std::string& bind_addr, int port);
  ~KmsHttpServer();

  KmsHttpServer(const KmsHttpServer&) = delete;
  KmsHttpServer& operator=(const KmsHttpServer&) = delete;

  /// Port actually bound (when constructed with port 0 the OS picks one).
  int port() const { return port_; }
  std::string base_url() const;

  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
  std::thread serve_thread_;
};

/// Starts a server and blocks until it stops (CLI entry point).
std::unique_ptr<KmsHttpServer> serve_http(std::shared_ptr<KmsKeyStore> store,
                                          const std::string& bind_addr, int port);

}  // namespace ccf
