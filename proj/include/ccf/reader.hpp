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

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "ccf/column.hpp"
#include "ccf/footer.hpp"
#include "ccf/keytools.hpp"

namespace ccf {

/// Byte-range access over an immutable file.  Implementations are safe for
/// concurrent read_at calls.
class RandomAccessSource {
 public:
  virtual ~RandomAccessSource() = default;
  virtual uint64_t size() const = 0;
  /// Exactly `length` bytes at `offset`; out-of-range throws DecodingError.
  virtual Bytes read_at(uint64_t offset, uint64_t length) const = 0;
};

class MemorySource final : public RandomAccessSource {
 public:
  explicit MemorySource(Bytes data) : data_(std::move(data)) {}

  uint64_t size() const override { return data_.size(); }
  Bytes read_at(uint64_t offset, uint64_t length) const override;

 private:
  Bytes data_;
};

/// pread-backed source; one shared descriptor, no seek state.
class FileSource final : public RandomAccessSource {
 public:
  explicit FileSource(const std::filesystem::path& path);  // throws Error
  ~FileSource() override;
  FileSource(const FileSource&) = delete;
  FileSource& operator=(const FileSource&) = delete;

  uint64_t size() const override { return size_; }
  Bytes read_at(uint64_t offset, uint64_t length) const override;

 private:
  int fd_ = -1;
  uint64_t size_ = 0;
  std::string path_;
};

/// Parses the trailing magic and length fields and returns the footer.  For
/// "CCFE" files the footer DEK is resolved through `resolver` (required),
/// the footer module AEAD-decrypted, and the JSON parsed.
FileFooter read_footer(const RandomAccessSource& source, KeyResolver* resolver = nullptr);

/// Projected columns of one row group, plus its row count (reported even for
/// an empty projection).
struct ProjectedRowGroup {
  uint64_t num_rows = 0;
  std::vector<ColumnVector> columns;  // parallel to the projection

  bool operator==(const ProjectedRowGroup&) const = default;
};

struct ReadOptions {
  /// Run the decrypt+decode kernel across chunks with OpenMP.
  bool parallel = false;
};

/// Reads and decodes exactly the projected chunks; DEKs are resolved only
/// for projected encrypted chunks.  Unknown names throw ProjectionError.
std::vector<ProjectedRowGroup> read_columns(const RandomAccessSource& source,
                                            const FileFooter& footer,
                                            const std::vector<std::string>& projection,
                                            KeyResolver* resolver = nullptr,
                                            const ReadOptions& opts = {});

}  // namespace ccf
