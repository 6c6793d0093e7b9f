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

#include "ccf/chunk_kernels.hpp"

#include <exception>

#include "ccf/encode.hpp"
#include "ccf/errors.hpp"

namespace ccf {

namespace {

Bytes encode_one(const ChunkEncodeItem& item) {
  Bytes plain = encode_chunk(*item.vector);
  if (!item.encrypted) return plain;
  return crypto::encrypt_module(item.dek, plain, item.aad).serialize();
}

ColumnVector decode_one(const ChunkDecodeItem& item) {
  if (!item.encrypted) return decode_chunk(item.blob, item.type, item.num_rows);
  const Bytes plain =
      crypto::decrypt_module(item.dek, crypto::EncryptedBlob::parse(item.blob), item.aad);
  return decode_chunk(plain, item.type, item.num_rows);
}

// OpenMP worksharing cannot propagate exceptions out of the parallel region;
// capture the first one and rethrow after the loop completes.
template <typename Out, typename Item, typename Fn>
std::vector<Out> run_parallel(const std::vector<Item>& items, Fn fn, Out filler) {
  std::vector<Out> out(items.size(), std::move(filler));
  std::exception_ptr error;
#if defined(CCF_HAVE_OPENMP)
#pragma omp parallel for schedule(dynamic)
#endif
  for (size_t i = 0; i < items.size(); ++i) {  // NOLINT: omp needs a plain loop
    try {
      out[i] = fn(items[i]);
    } catch (...) {
#if defined(CCF_HAVE_OPENMP)
#pragma omp critical(ccf_kernel_error)
#endif
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace

std::vector<Bytes> encode_encrypt_serial(const std::vector<ChunkEncodeItem>& items) {
  std::vector<Bytes> out;
  out.reserve(items.size());
  for (const ChunkEncodeItem& item : items) out.push_back(encode_one(item));
  return out;
}

std::vector<ColumnVector> decrypt_decode_serial(const std::vector<ChunkDecodeItem>& items) {
  std::vector<ColumnVector> out;
  out.reserve(items.size());
  for (const ChunkDecodeItem& item : items) out.push_back(decode_one(item));
  return out;
}

std::vector<Bytes> encode_encrypt_parallel(const std::vector<ChunkEncodeItem>& items) {
  return run_parallel<Bytes>(items, encode_one, Bytes{});
}

std::vector<ColumnVector> decrypt_decode_parallel(const std::vector<ChunkDecodeItem>& items) {
  return run_parallel<ColumnVector>(items, decode_one, ColumnVector(ColumnType::Int64));
}

}  // namespace ccf
