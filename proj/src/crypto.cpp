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

#include "ccf/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <memory>

#include "ccf/errors.hpp"

namespace ccf::crypto {

namespace {

struct CtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter>;

CipherCtx new_ctx() {
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw CryptoError("EVP_CIPHER_CTX_new failed");
  return ctx;
}

void require_key(std::span<const uint8_t> key) {
  if (key.size() != kKeyLen) throw CryptoError("key must be 16 bytes");
}

EncryptedBlob aead_encrypt(std::span<const uint8_t> key, std::span<const uint8_t> plaintext,
                           std::span<const uint8_t> aad) {
  require_key(key);
  EncryptedBlob blob;
  blob.nonce = random_bytes(kNonceLen);
  blob.ciphertext.resize(plaintext.size());
  blob.tag.resize(kTagLen);

  auto ctx = new_ctx();
  if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, nullptr, nullptr) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kNonceLen, nullptr) != 1 ||
      EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), blob.nonce.data()) != 1) {
    throw CryptoError("GCM encrypt init failed");
  }

  int len = 0;
  if (!aad.empty() &&
      EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1) {
    throw CryptoError("GCM AAD update failed");
  }
  if (!plaintext.empty() &&
      EVP_EncryptUpdate(ctx.get(), blob.ciphertext.data(), &len, plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1) {
    throw CryptoError("GCM encrypt update failed");
  }
  if (EVP_EncryptFinal_ex(ctx.get(), nullptr, &len) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagLen, blob.tag.data()) != 1) {
    throw CryptoError("GCM encrypt finalization failed");
  }
  return blob;
}

Bytes aead_decrypt(std::span<const uint8_t> key, const EncryptedBlob& blob,
                   std::span<const uint8_t> aad) {
  require_key(key);
  if (blob.nonce.size() != kNonceLen || blob.tag.size() != kTagLen) {
    throw MalformedBlob("bad nonce or tag length");
  }
  Bytes plaintext(blob.ciphertext.size());

  auto ctx = new_ctx();
  if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, nullptr, nullptr) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kNonceLen, nullptr) != 1 ||
      EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), blob.nonce.data()) != 1) {
    throw CryptoError("GCM decrypt init failed");
  }

  int len = 0;
  if (!aad.empty() &&
      EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1) {
    throw CryptoError("GCM AAD update failed");
  }
  if (!blob.ciphertext.empty() &&
      EVP_DecryptUpdate(ctx.get(), plaintext.data(), &len, blob.ciphertext.data(),
                        static_cast<int>(blob.ciphertext.size())) != 1) {
    throw CryptoError("GCM decrypt update failed");
  }
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagLen,
                          const_cast<uint8_t*>(blob.tag.data())) != 1) {
    throw CryptoError("GCM set tag failed");
  }
  if (EVP_DecryptFinal_ex(ctx.get(), nullptr, &len) != 1) {
    throw IntegrityError("module authentication failed");
  }
  return plaintext;
}

}  // namespace

Bytes ModuleAad::serialize() const {
  Bytes out;
  out.reserve(21);
  out.insert(out.end(), file_id.begin(), file_id.end());
  out.push_back(module_type);
  put_u16_le(out, row_group);
  put_u16_le(out, column_ordinal);
  return out;
}

Bytes EncryptedBlob::serialize() const {
  Bytes out;
  out.reserve(nonce.size() + ciphertext.size() + tag.size());
  out.insert(out.end(), nonce.begin(), nonce.end());
  out.insert(out.end(), ciphertext.begin(), ciphertext.end());
  out.insert(out.end(), tag.begin(), tag.end());
  return out;
}

EncryptedBlob EncryptedBlob::parse(std::span<const uint8_t> data) {
  if (data.size() < kNonceLen + kTagLen) throw MalformedBlob("encrypted blob too short");
  EncryptedBlob blob;
  blob.nonce.assign(data.begin(), data.begin() + kNonceLen);
  blob.ciphertext.assign(data.begin() + kNonceLen, data.end() - kTagLen);
  blob.tag.assign(data.end() - kTagLen, data.end());
  return blob;
}

Bytes random_bytes(size_t n) {
  Bytes out(n);
  if (n > 0 && RAND_bytes(out.data(), static_cast<int>(n)) != 1) {
    throw CryptoError("RAND_bytes failed");
  }
  return out;
}

Bytes generate_key(size_t len_bytes) {
  if (len_bytes != kKeyLen) throw CryptoError("only 16-byte keys are supported");
  return random_bytes(len_bytes);
}

EncryptedBlob encrypt_module(std::span<const uint8_t> key, std::span<const uint8_t> plaintext,
                             const ModuleAad& aad) {
  return aead_encrypt(key, plaintext, aad.serialize());
}

Bytes decrypt_module(std::span<const uint8_t> key, const EncryptedBlob& blob,
                     const ModuleAad& aad) {
  return aead_decrypt(key, blob, aad.serialize());
}

std::string wrap_key(std::span<const uint8_t> wrapping_key, std::span<const uint8_t> key_to_wrap) {
  if (key_to_wrap.size() != kKeyLen) throw CryptoError("wrapped key must be 16 bytes");
  // Wrapped keys use empty AAD, keeping them in a separate AAD domain from
  // file modules.
  const EncryptedBlob blob = aead_encrypt(wrapping_key, key_to_wrap, {});
  return base64_encode(blob.serialize());
}

Bytes unwrap_key(std::span<const uint8_t> wrapping_key, const std::string& wrapped_b64) {
  const auto raw = base64_decode(wrapped_b64);
  if (!raw) throw MalformedBlob("wrapped key is not valid base64");
  const EncryptedBlob blob = EncryptedBlob::parse(*raw);
  return aead_decrypt(wrapping_key, blob, {});
}

}  // namespace ccf::crypto
