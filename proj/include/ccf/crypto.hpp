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

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "ccf/bytes.hpp"

namespace ccf::crypto {

inline constexpr size_t kKeyLen = 16;    // AES-128
inline constexpr size_t kNonceLen = 12;  // 96-bit GCM nonce
inline constexpr size_t kTagLen = 16;    // 128-bit GCM tag

using FileId = std::array<uint8_t, 16>;

/// AAD identifying one encrypted module (column chunk or footer) within a
/// file.  Serialized layout, 21 bytes:
///   file_id[16] ++ module_type:u8 ++ row_group:u16-LE ++ column_ordinal:u16-LE
/// module_type 0 = footer, 1 = column chunk; footers use 0xFFFF for both
/// row_group and column_ordinal.
struct ModuleAad {
  FileId file_id{};
  uint8_t module_type = 1;
  uint16_t row_group = 0;
  uint16_t column_ordinal = 0;

  static ModuleAad for_chunk(const FileId& fid, uint16_t row_group, uint16_t ordinal) {
    return ModuleAad{fid, 1, row_group, ordinal};
  }

  // The footer AAD carries a zero file id: the real file id is only known
  // after the footer itself is decrypted.
  static ModuleAad for_footer() { return ModuleAad{FileId{}, 0, 0xFFFF, 0xFFFF}; }

  Bytes serialize() const;
};

/// nonce ++ ciphertext ++ tag, the bit-exact on-disk form of one encrypted
/// module.
struct EncryptedBlob {
  Bytes nonce;
  Bytes ciphertext;
  Bytes tag;

  Bytes serialize() const;
  /// Throws MalformedBlob when shorter than nonce + tag.
  static EncryptedBlob parse(std::span<const uint8_t> data);
};

/// Fresh random key bytes from the process CSPRNG.  Only 16-byte keys are
/// supported.  Throws CryptoError on RNG failure.
Bytes generate_key(size_t len_bytes = kKeyLen);

/// Random bytes helper (file ids, nonces).
Bytes random_bytes(size_t n);

/// AES-128-GCM with a fresh random nonce.
EncryptedBlob encrypt_module(std::span<const uint8_t> key, std::span<const uint8_t> plaintext,
                             const ModuleAad& aad);

/// Inverse of encrypt_module.  Authentication failure (tampered data or
/// wrong key, indistinguishable) throws IntegrityError.
Bytes decrypt_module(std::span<const uint8_t> key, const EncryptedBlob& blob,
                     const ModuleAad& aad);

/// Key wrapping: AEAD-encrypt `key_to_wrap` under `wrapping_key` with empty
/// AAD, base64 of the serialized blob.
std::string wrap_key(std::span<const uint8_t> wrapping_key, std::span<const uint8_t> key_to_wrap);

/// Inverse of wrap_key.  Throws MalformedBlob on undecodable input and
/// IntegrityError on authentication failure.
Bytes unwrap_key(std::span<const uint8_t> wrapping_key, const std::string& wrapped_b64);

}  // namespace ccf::crypto
