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

#include <vector>

#include "ccf/bytes.hpp"
#include "ccf/column.hpp"
#include "ccf/crypto.hpp"

namespace ccf {

// CPU-bound halves of the write and read paths, factored out so they can run
// data-parallel.  Key resolution (the KMS-visible part) stays serial in the
// callers; by the time a kernel runs, every item already carries its DEK.

/// One chunk on the write side: plaintext vector in, file bytes out.
struct ChunkEncodeItem {
  const ColumnVector* vector = nullptr;
  bool encrypted = false;
  Bytes dek;              // 16 bytes when encrypted
  crypto::ModuleAad aad;  // ignored when plaintext
};

/// One chunk on the read side: file bytes in, decoded vector out.
struct ChunkDecodeItem {
  Bytes blob;  // raw chunk region (ciphertext when encrypted)
  ColumnType type = ColumnType::Int64;
  uint64_t num_rows = 0;
  bool encrypted = false;
  Bytes dek;
  crypto::ModuleAad aad;
};

std::vector<Bytes> encode_encrypt_serial(const std::vector<ChunkEncodeItem>& items);
std::vector<ColumnVector> decrypt_decode_serial(const std::vector<ChunkDecodeItem>& items);

/// OpenMP variants; bit-identical results apart from fresh nonces (encode) —
/// and exactly identical when `encrypted` is false everywhere.  Fall back to
/// the serial loops when built without OpenMP.  The first exception raised
/// by any item is rethrown after the loop drains.
std::vector<Bytes> encode_encrypt_parallel(const std::vector<ChunkEncodeItem>& items);
std::vector<ColumnVector> decrypt_decode_parallel(const std::vector<ChunkDecodeItem>& items);

}  // namespace ccf
