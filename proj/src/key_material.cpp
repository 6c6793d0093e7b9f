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

#include "ccf/key_material.hpp"

#include <json.hpp>

#include "ccf/bytes.hpp"
#include "ccf/crypto.hpp"
#include "ccf/errors.hpp"

namespace ccf {

using nlohmann::json;

std::string_view wrap_mode_name(WrapMode m) {
  return m == WrapMode::Single ? "single" : "double";
}

std::string encode_key_material(const KeyMaterial& km) {
  json j;
  j["keyMaterialType"] = km.key_material_type;
  j["isFooterKey"] = km.is_footer_key;
  j["masterKeyID"] = km.master_key_id;
  j["doubleWrapping"] = km.double_wrapping;
  j["wrappedDEK"] = km.wrapped_dek;
  if (km.double_wrapping) {
    if (!km.kek_id || !km.wrapped_kek) {
      throw MalformedKeyMaterial("double wrapping requires kekID and wrappedKEK");
    }
    j["kekID"] = *km.kek_id;
    j["wrappedKEK"] = *km.wrapped_kek;
  } else if (km.kek_id || km.wrapped_kek) {
    throw MalformedKeyMaterial("single wrapping must not carry kekID or wrappedKEK");
  }
  return j.dump();
}

namespace {

const json& require_field(const json& j, const char* name, json::value_t type) {
  const auto it = j.find(name);
  if (it == j.end()) {
    throw MalformedKeyMaterial(std::string("key material missing field ") + name);
  }
  if (it->type() != type) {
    throw MalformedKeyMaterial(std::string("key material field has wrong type: ") + name);
  }
  return *it;
}

std::string require_b64(const json& j, const char* name, std::optional<size_t> decoded_len) {
  const std::string value = require_field(j, name, json::value_t::string).get<std::string>();
  const auto decoded = base64_decode(value);
  if (!decoded || (decoded_len && decoded->size() != *decoded_len)) {
    throw MalformedKeyMaterial(std::string("field is not valid base64: ") + name);
  }
  return value;
}

}  // namespace

KeyMaterial decode_key_material(const std::string& json_text) {
  json j = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    throw MalformedKeyMaterial("key material is not a JSON object");
  }

  static const char* kKnown[] = {"keyMaterialType", "isFooterKey",  "masterKeyID",
                                 "doubleWrapping",  "wrappedDEK",   "kekID",
                                 "wrappedKEK"};
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* k : kKnown) known |= key == k;
    if (!known) throw MalformedKeyMaterial("unknown key material field: " + key);
  }

  KeyMaterial km;
  km.key_material_type = require_field(j, "keyMaterialType", json::value_t::string).get<std::string>();
  if (km.key_material_type != "CKM1") {
    throw MalformedKeyMaterial("unsupported key material type: " + km.key_material_type);
  }
  km.is_footer_key = require_field(j, "isFooterKey", json::value_t::boolean).get<bool>();
  km.master_key_id = require_field(j, "masterKeyID", json::value_t::string).get<std::string>();
  if (km.master_key_id.empty()) throw MalformedKeyMaterial("empty masterKeyID");
  km.double_wrapping = require_field(j, "doubleWrapping", json::value_t::boolean).get<bool>();
  km.wrapped_dek = require_b64(j, "wrappedDEK", std::nullopt);

  const bool has_kek = j.contains("kekID") || j.contains("wrappedKEK");
  if (km.double_wrapping) {
    km.kek_id = require_b64(j, "kekID", crypto::kKeyLen);
    km.wrapped_kek = require_b64(j, "wrappedKEK", std::nullopt);
  } else if (has_kek) {
    throw MalformedKeyMaterial("single-wrapped material must not carry KEK fields");
  }
  return km;
}

}  // namespace ccf
