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

#include <span>

#include "ccf/bytes.hpp"
#include "ccf/column.hpp"

namespace ccf {

/// Serializes one column chunk:
///   null bitmap, ceil(n/8) bytes, LSB-first (bit 1 = value present)
///   ++ PLAIN values: INT64/DATE 8-byte LE, DOUBLE IEEE-754 LE,
///      BOOL one byte (0/1), STRING u32-LE length ++ UTF-8 bytes.
/// Null slots encode the type's zero value.
Bytes encode_chunk(const ColumnVector& vector);

/// Inverse of encode_chunk.  Rejects truncated buffers, trailing bytes and
/// invalid UTF-8 with DecodingError.
ColumnVector decode_chunk(std::span<const uint8_t> bytes, ColumnType type, uint64_t num_rows);

}  // namespace ccf
