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

#include "ccf/kms_server.hpp"

#include <httplib.h>

#include <json.hpp>

#include "ccf/errors.hpp"

namespace ccf {

using nlohmann::json;

namespace {

std::string bearer_token(const httplib::Request& req) {
  const std::string auth = req.get_header_value("Authorization");
  constexpr std::string_view kPrefix = "Bearer ";
  if (auth.rfind(kPrefix, 0) != 0) return {};
  return auth.substr(kPrefix.size());
}

void set_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(json{{"error", message}}.dump(), "application/json");
}

// Maps store exceptions onto wire statuses shared by every route.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const AccessDenied&) {
    set_error(res, 403, "access denied");
  } catch (const Unauthorized&) {
    set_error(res, 403, "access denied");
  } catch (const UnknownKey&) {
    set_error(res, 404, "unknown key");
  } catch (const DuplicateKey&) {
    set_error(res, 409, "duplicate key");
  } catch (const IntegrityError&) {
    set_error(res, 400, "integrity failure");
  } catch (const std::exception& e) {
    set_error(res, 400, e.what());
  }
}

std::string body_string_field(const httplib::Request& req, const char* field) {
  const json j = json::parse(req.body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object() || !j.contains(field) || !j.at(field).is_string()) {
    throw Error(std::string("request body must carry string field ") + field);
  }
  return j.at(field).get<std::string>();
}

}  // namespace

struct KmsHttpServer::Impl {
  std::shared_ptr<KmsKeyStore> store;
  httplib::Server server;
};

KmsHttpServer::KmsHttpServer(std::shared_ptr<KmsKeyStore> store, const std::string& bind_addr,
                             int port)
    : impl_(std::make_unique<Impl>()) {
  impl_->store = std::move(store);
  auto& srv = impl_->server;
  auto* store_ptr = impl_->store.get();

  srv.Post(R"(/v1/keys/([^/]+)/wrap)", [store_ptr](const httplib::Request& req,
                                                   httplib::Response& res) {
    guarded(res, [&] {
      const auto plaintext = base64_decode(body_string_field(req, "plaintext"));
      if (!plaintext) throw Error("plaintext is not valid base64");
      const std::string wrapped = store_ptr->wrap(bearer_token(req), req.matches[1], *plaintext);
      res.set_content(json{{"wrapped", wrapped}}.dump(), "application/json");
    });
  });

  srv.Post(R"(/v1/keys/([^/]+)/unwrap)", [store_ptr](const httplib::Request& req,
                                                     httplib::Response& res) {
    guarded(res, [&] {
      const std::string wrapped = body_string_field(req, "wrapped");
      const Bytes plaintext = store_ptr->unwrap(bearer_token(req), req.matches[1], wrapped);
      res.set_content(json{{"plaintext", base64_encode(plaintext)}}.dump(), "application/json");
    });
  });

  srv.Put(R"(/v1/keys/([^/]+))", [store_ptr](const httplib::Request& req,
                                             httplib::Response& res) {
    guarded(res, [&] {
      std::set<std::string> allowed;
      if (!req.body.empty()) {
        const json j = json::parse(req.body, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw Error("bad request body");
        if (j.contains("allowed_tokens")) {
          for (const auto& t : j.at("allowed_tokens")) allowed.insert(t.get<std::string>());
        }
      }
      store_ptr->create_master_key(bearer_token(req), req.matches[1], std::move(allowed));
      res.set_content(json{{"created", true}}.dump(), "application/json");
    });
  });

  srv.Delete(R"(/v1/keys/([^/]+)/tokens/([^/]+))", [store_ptr](const httplib::Request& req,
                                                               httplib::Response& res) {
    guarded(res, [&] {
      store_ptr->revoke_access(bearer_token(req), req.matches[1], req.matches[2]);
      res.set_content(json{{"revoked", true}}.dump(), "application/json");
    });
  });

  if (port == 0) {
    port_ = srv.bind_to_any_port(bind_addr);
  } else {
    if (!srv.bind_to_port(bind_addr, port)) {
      throw KmsUnavailable("cannot bind KMS server to port " + std::to_string(port));
    }
    port_ = port;
  }
  if (port_ <= 0) throw KmsUnavailable("cannot bind KMS server");

  serve_thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

KmsHttpServer::~KmsHttpServer() { stop(); }

void KmsHttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
  if (serve_thread_.joinable()) serve_thread_.join();
}

std::string KmsHttpServer::base_url() const {
  return "http://127.0.0.1:" + std::to_string(port_);
}

std::unique_ptr<KmsHttpServer> serve_http(std::shared_ptr<KmsKeyStore> store,
                                          const std::string& bind_addr, int port) {
  return std::make_unique<KmsHttpServer>(std::move(store), bind_addr, port);
}

}  // namespace ccf
