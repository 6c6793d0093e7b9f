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

#include "ccf/reader.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "ccf/chunk_kernels.hpp"
#include "ccf/errors.hpp"

namespace ccf {

namespace {

constexpr uint64_t kMagicLen = 4;
// Shortest well-formed file: magic + footer length + magic.
constexpr uint64_t kMinFileLen = kMagicLen + 4 + kMagicLen;

bool magic_equals(const Bytes& bytes, const char (&magic)[4]) {
  return bytes.size() == 4 && std::memcmp(bytes.data(), magic, 4) == 0;
}

uint64_t checked_region_start(uint64_t end, uint64_t length, const char* what) {
  if (length > end) throw DecodingError(std::string(what) + " length exceeds file size");
  return end - length;
}

}  // namespace

Bytes MemorySource::read_at(uint64_t offset, uint64_t length) const {
  if (offset > data_.size() || length > data_.size() - offset) {
    throw DecodingError("read past end of source");
  }
  return Bytes(data_.begin() + static_cast<ptrdiff_t>(offset),
               data_.begin() + static_cast<ptrdiff_t>(offset + length));
}

FileSource::FileSource(const std::filesystem::path& path) : path_(path.string()) {
  fd_ = ::open(path_.c_str(), O_RDONLY);
  if (fd_ < 0) throw Error("cannot open " + path_ + ": " + std::strerror(errno));
  struct stat st{};
  if (::fstat(fd_, &st) != 0) {
    const int err = errno;
    ::close(fd_);
    throw Error("cannot stat " + path_ + ": " + std::strerror(err));
  }
  size_ = static_cast<uint64_t>(st.st_size);
}

FileSource::~FileSource() {
  if (fd_ >= 0) ::close(fd_);
}

Bytes FileSource::read_at(uint64_t offset, uint64_t length) const {
  if (offset > size_ || length > size_ - offset) {
    throw DecodingError("read past end of " + path_);
  }
  Bytes out(length);
  uint64_t done = 0;
  while (done < length) {
    const ssize_t n = ::pread(fd_, out.data() + done, length - done,
                              static_cast<off_t>(offset + done));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error("read error on " + path_ + ": " + std::strerror(errno));
    }
    if (n == 0) throw DecodingError("unexpected end of " + path_);
    done += static_cast<uint64_t>(n);
  }
  return out;
}

FileFooter read_footer(const RandomAccessSource& source, KeyResolver* resolver) {
  const uint64_t size = source.size();
  if (size < kMinFileLen) throw NotAColumnarFile("file too short");

  const Bytes tail_magic = source.read_at(size - kMagicLen, kMagicLen);
  const Bytes head_magic = source.read_at(0, kMagicLen);
  const bool encrypted = magic_equals(tail_magic, kMagicEncrypted);
  if (!encrypted && !magic_equals(tail_magic, kMagicPlain)) {
    throw NotAColumnarFile("bad trailing magic");
  }
  if (head_magic != tail_magic) throw NotAColumnarFile("leading and trailing magic disagree");

  if (!encrypted) {
    const uint64_t len_pos = size - kMagicLen - 4;
    const uint32_t footer_len = get_u32_le(source.read_at(len_pos, 4).data());
    const uint64_t footer_pos = checked_region_start(len_pos, footer_len, "footer");
    const Bytes footer_json = source.read_at(footer_pos, footer_len);
    return decode_footer(to_string(footer_json));
  }

  if (size < kMinFileLen + 4) throw NotAColumnarFile("file too short");
  const uint64_t footer_len_pos = size - kMagicLen - 4;
  const uint64_t km_len_pos = footer_len_pos - 4;
  const uint32_t footer_len = get_u32_le(source.read_at(footer_len_pos, 4).data());
  const uint32_t km_len = get_u32_le(source.read_at(km_len_pos, 4).data());
  const uint64_t footer_pos = checked_region_start(km_len_pos, footer_len, "footer");
  const uint64_t km_pos = checked_region_start(footer_pos, km_len, "key material");

  const KeyMaterial km = decode_key_material(to_string(source.read_at(km_pos, km_len)));
  if (!km.is_footer_key) throw MalformedKeyMaterial("footer key material not marked as such");
  if (!resolver) throw CryptoError("encrypted file requires a key resolver");
  const Bytes dek = resolver->resolve(km);

  const Bytes blob = source.read_at(footer_pos, footer_len);
  const Bytes footer_json = crypto::decrypt_module(dek, crypto::EncryptedBlob::parse(blob),
                                                   crypto::ModuleAad::for_footer());
  return decode_footer(to_string(footer_json));
}

std::vector<ProjectedRowGroup> read_columns(const RandomAccessSource& source,
                                            const FileFooter& footer,
                                            const std::vector<std::string>& projection,
                                            KeyResolver* resolver, const ReadOptions& opts) {
  std::vector<uint16_t> ordinals;
  ordinals.reserve(projection.size());
  for (const std::string& name : projection) ordinals.push_back(footer.schema.ordinal_of(name));

  std::vector<ProjectedRowGroup> out;
  out.reserve(footer.row_groups.size());
  for (const RowGroupMeta& rg : footer.row_groups) {
    // Serial pass: fetch bytes and resolve DEKs for projected chunks only.
    std::vector<ChunkDecodeItem> items;
    items.reserve(ordinals.size());
    for (const uint16_t ord : ordinals) {
      const ColumnChunkMeta& meta = rg.chunks.at(ord);
      ChunkDecodeItem item;
      item.blob = source.read_at(meta.offset, meta.length);
      item.type = footer.schema.columns[ord].type;
      item.num_rows = rg.num_rows;
      if (meta.encrypted) {
        if (!resolver) throw CryptoError("encrypted column requires a key resolver");
        item.encrypted = true;
        item.dek = resolver->resolve(*meta.key_material);
        item.aad = crypto::ModuleAad::for_chunk(footer.file_id, meta.row_group, meta.ordinal);
      }
      items.push_back(std::move(item));
    }
    ProjectedRowGroup prg;
    prg.num_rows = rg.num_rows;
    prg.columns = opts.parallel ? decrypt_decode_parallel(items) : decrypt_decode_serial(items);
    out.push_back(std::move(prg));
  }
  return out;
}

}  // namespace ccf
