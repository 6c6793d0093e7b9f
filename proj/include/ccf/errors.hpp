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

#include <stdexcept>
#include <string>

namespace ccf {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ── encoding / file format ──────────────────────────────────────────────

class EncodingError : public Error {
 public:
  using Error::Error;
};

class DecodingError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class NotAColumnarFile : public Error {
 public:
  using Error::Error;
};

class ProjectionError : public Error {
 public:
  using Error::Error;
};

// ── crypto ──────────────────────────────────────────────────────────────

class CryptoError : public Error {
 public:
  using Error::Error;
};

/// Authentication failure: tampered data or wrong key (indistinguishable).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// Serialized blob too short to hold nonce + tag.
class MalformedBlob : public Error {
 public:
  using Error::Error;
};

// ── key management ──────────────────────────────────────────────────────

class MalformedKeyMaterial : public Error {
 public:
  using Error::Error;
};

class AccessDenied : public Error {
 public:
  using Error::Error;
};

class UnknownKey : public Error {
 public:
  using Error::Error;
};

class DuplicateKey : public Error {
 public:
  using Error::Error;
};

class Unauthorized : public Error {
 public:
  using Error::Error;
};

class KmsUnavailable : public Error {
 public:
  using Error::Error;
};

// ── query ───────────────────────────────────────────────────────────────

class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace ccf
