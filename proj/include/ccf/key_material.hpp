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

#include <optional>
#include <string>

namespace ccf {

enum class WrapMode { Single, Double };

std::string_view wrap_mode_name(WrapMode m);

/// Per-module key record stored next to the encrypted data.
///
/// Single wrapping: wrapped_dek is the KMS-wrapped DEK.
/// Double wrapping: wrapped_dek is the DEK wrapped locally under a KEK, and
/// kek_id / wrapped_kek identify and carry the KMS-wrapped KEK.
struct KeyMaterial {
  std::string key_material_type = "CKM1";
  bool is_footer_key = false;
  std::string master_key_id;
  bool double_wrapping = false;
  std::string wrapped_dek;                 // base64
  std::optional<std::string> kek_id;       // base64 of 16 bytes
  std::optional<std::string> wrapped_kek;  // base64

  bool operator==(const KeyMaterial&) const = default;
};

/// JSON with field names
///   keyMaterialType, isFooterKey, masterKeyID, doubleWrapping, wrappedDEK,
///   kekID, wrappedKEK (the last two only in double wrapping).
std::string encode_key_material(const KeyMaterial& km);

/// Strict inverse: unknown key_material_type, missing fields, unknown fields
/// or a single/double contradiction throw MalformedKeyMaterial.
KeyMaterial decode_key_material(const std::string& json_text);

}  // namespace ccf
