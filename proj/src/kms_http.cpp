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

#include <httplib.h>

#include <json.hpp>

#include "ccf/errors.hpp"
#include "ccf/kms.hpp"

namespace ccf {

using nlohmann::json;

namespace {

httplib::Client make_client(const std::string& base_url) {
  httplib::Client cli(base_url);
  cli.set_connection_timeout(5, 0);
  cli.set_read_timeout(30, 0);
  return cli;
}

httplib::Headers auth_headers(const std::string& token) {
  return {{"Authorization", "Bearer " + token}};
}

/// Maps a response onto the client error taxonomy; returns the body on 200.
std::string check_response(const httplib::Result& result) {
  if (!result) {
    throw KmsUnavailable("KMS unreachable: " + httplib::to_string(result.error()));
  }
  if (result->status == 200) return result->body;

  std::string message = "KMS error";
  const json j = json::parse(result->body, nullptr, false);
  if (!j.is_discarded() && j.is_object() && j.contains("error")) {
    message = j.at("error").get<std::string>();
  }
  switch (result->status) {
    case 403: throw AccessDenied(message);
    case 404: throw UnknownKey(message);
    case 409: throw DuplicateKey(message);
    default: throw Error("KMS returned status " + std::to_string(result->status) + ": " + message);
  }
}

std::string parse_string_field(const std::string& body, const char* field) {
  const json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains(field) || !j.at(field).is_string()) {
    throw Error(std::string("malformed KMS response, expected field ") + field);
  }
  return j.at(field).get<std::string>();
}

}  // namespace

HttpKmsClient::HttpKmsClient(std::string base_url, std::string token)
    : base_url_(std::move(base_url)), token_(std::move(token)) {}

std::string HttpKmsClient::post(const std::string& path, const std::string& body) {
  auto cli = make_client(base_url_);
  return check_response(cli.Post(path, auth_headers(token_), body, "application/json"));
}

std::string HttpKmsClient::do_wrap(const std::string& key_id, const Bytes& plaintext_key) {
  const std::string body = json{{"plaintext", base64_encode(plaintext_key)}}.dump();
  return parse_string_field(post("/v1/keys/" + key_id + "/wrap", body), "wrapped");
}

Bytes HttpKmsClient::do_unwrap(const std::string& key_id, const std::string& wrapped_b64) {
  const std::string body = json{{"wrapped", wrapped_b64}}.dump();
  const std::string b64 = parse_string_field(post("/v1/keys/" + key_id + "/unwrap", body),
                                             "plaintext");
  const auto plaintext = base64_decode(b64);
  if (!plaintext) throw Error("KMS returned invalid base64 plaintext");
  return *plaintext;
}

std::shared_ptr<KmsClient> http_client(const std::string& base_url, const std::string& token) {
  return std::make_shared<HttpKmsClient>(base_url, token);
}

void http_create_master_key(const std::string& base_url, const std::string& admin_token,
                            const std::string& key_id,
                            const std::set<std::string>& allowed_tokens) {
  auto cli = make_client(base_url);
  const std::string body = json{{"allowed_tokens", allowed_tokens}}.dump();
  check_response(cli.Put("/v1/keys/" + key_id, auth_headers(admin_token), body,
                         "application/json"));
}

void http_revoke_access(const std::string& base_url, const std::string& admin_token,
                        const std::string& key_id, const std::string& token) {
  auto cli = make_client(base_url);
  check_response(cli.Delete("/v1/keys/" + key_id + "/tokens/" + token, auth_headers(admin_token)));
}

}  // namespace ccf
