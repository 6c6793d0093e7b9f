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

#include "ccf/encode.hpp"

#include <cstring>
#include <limits>

namespace ccf {

namespace {

class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

  const uint8_t* take(size_t n) {
    if (n > data_.size() - pos_) throw DecodingError("chunk buffer truncated");
    const uint8_t* p = data_.data() + pos_;
    pos_ += n;
    return p;
  }

  size_t remaining() const { return data_.size() - pos_; }

 private:
  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

// Wire form is canonical: a null slot must carry the type's zero value.
template <typename T>
void check_placeholder(const T& value, bool present) {
  if (!present && value != T{}) {
    throw DecodingError("null slot carries a non-zero placeholder");
  }
}

}  // namespace

Bytes encode_chunk(const ColumnVector& vector) {
  const size_t n = vector.size();
  Bytes out((n + 7) / 8, 0);
  for (size_t i = 0; i < n; ++i) {
    if (!vector.is_null(i)) out[i / 8] |= static_cast<uint8_t>(1u << (i % 8));
  }

  switch (vector.type()) {
    case ColumnType::Int64:
    case ColumnType::Date:
      for (int64_t v : vector.int64s()) put_u64_le(out, static_cast<uint64_t>(v));
      break;
    case ColumnType::Double:
      for (double v : vector.doubles()) {
        uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        put_u64_le(out, bits);
      }
      break;
    case ColumnType::Bool:
      out.insert(out.end(), vector.bools().begin(), vector.bools().end());
      break;
    case ColumnType::String:
      for (const std::string& s : vector.strings()) {
        if (s.size() > std::numeric_limits<uint32_t>::max()) {
          throw EncodingError("string exceeds 2^32-1 bytes");
        }
        put_u32_le(out, static_cast<uint32_t>(s.size()));
        out.insert(out.end(), s.begin(), s.end());
      }
      break;
  }
  return out;
}

ColumnVector decode_chunk(std::span<const uint8_t> bytes, ColumnType type, uint64_t num_rows) {
  ByteReader reader(bytes);
  const size_t n = static_cast<size_t>(num_rows);
  const uint8_t* bitmap = reader.take((n + 7) / 8);
  std::vector<bool> validity(n);
  for (size_t i = 0; i < n; ++i) validity[i] = (bitmap[i / 8] >> (i % 8)) & 1;

  ColumnVector result(type);
  switch (type) {
    case ColumnType::Int64:
    case ColumnType::Date: {
      std::vector<int64_t> values(n);
      for (size_t i = 0; i < n; ++i) {
        values[i] = static_cast<int64_t>(get_u64_le(reader.take(8)));
        check_placeholder(values[i], validity[i]);
      }
      result = type == ColumnType::Date ? ColumnVector::date_column(std::move(values), validity)
                                        : ColumnVector::int64_column(std::move(values), validity);
      break;
    }
    case ColumnType::Double: {
      std::vector<double> values(n);
      for (size_t i = 0; i < n; ++i) {
        const uint64_t bits = get_u64_le(reader.take(8));
        std::memcpy(&values[i], &bits, sizeof(double));
        check_placeholder(values[i], validity[i]);
      }
      result = ColumnVector::double_column(std::move(values), validity);
      break;
    }
    case ColumnType::Bool: {
      std::vector<uint8_t> values(n);
      for (size_t i = 0; i < n; ++i) {
        const uint8_t b = *reader.take(1);
        if (b > 1) throw DecodingError("bool byte out of range");
        values[i] = b;
        check_placeholder(values[i], validity[i]);
      }
      result = ColumnVector::bool_column(std::move(values), validity);
      break;
    }
    case ColumnType::String: {
      std::vector<std::string> values(n);
      for (size_t i = 0; i < n; ++i) {
        const uint32_t len = get_u32_le(reader.take(4));
        const uint8_t* p = reader.take(len);
        values[i].assign(reinterpret_cast<const char*>(p), len);
        if (!utf8_valid(values[i])) throw DecodingError("string value is not valid UTF-8");
        check_placeholder(values[i], validity[i]);
      }
      result = ColumnVector::string_column(std::move(values), validity);
      break;
    }
  }
  if (reader.remaining() != 0) throw DecodingError("trailing bytes after chunk values");
  return result;
}

}  // namespace ccf
