// Copyright 2026 The attest Authors
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

#include "attest/bytes.hpp"

namespace attest::crypto {

inline constexpr std::size_t kSha1Len = 20;
inline constexpr std::size_t kSha256Len = 32;
inline constexpr std::size_t kSeedLen = 32;
inline constexpr std::size_t kPublicKeyLen = 32;
inline constexpr std::size_t kSignatureLen = 64;

Bytes sha1(BytesView data);
Bytes sha256(BytesView data);
Bytes hmac_sha1(BytesView key, BytesView data);

/// Deterministic Ed25519 signing key. The private half is derived from a
/// 32-byte seed and never exposed; equal seeds yield equal keys.
class SigningKey {
 public:
  static SigningKey from_seed(BytesView seed32);
  static SigningKey generate();

  const Bytes& public_key() const { return public_; }
  Bytes sign(BytesView message) const;

 private:
  SigningKey(Bytes seed, Bytes pub)
      : seed_(std::move(seed)), public_(std::move(pub)) {}

  Bytes seed_;
  Bytes public_;
};

bool verify(BytesView public_key, BytesView message, BytesView signature);

Bytes random_bytes(std::size_t n);

// Length-aware constant-time comparison.
bool constant_time_equal(BytesView a, BytesView b);
bool constant_time_equal(std::string_view a, std::string_view b);

}  // namespace attest::crypto
