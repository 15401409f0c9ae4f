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

#include <array>
#include <cstdint>
#include <map>
#include <optional>

#include "attest/bytes.hpp"
#include "attest/cel.hpp"
#include "attest/crypto.hpp"

namespace attest::tpm {

using PcrArray = std::array<Bytes, cel::kPcrCount>;

/// One PCR bank: 24 slots of digest_length(alg) bytes each, all-zero at reset.
struct PcrBank {
  cel::HashAlg alg;
  PcrArray values;

  static PcrBank reset_state(cel::HashAlg alg);
};

/// 3-byte PCR selection bitmap: bit (i % 8) of byte (i / 8) selects PCR i.
class PcrSelection {
 public:
  PcrSelection() = default;
  static PcrSelection of(std::initializer_list<std::uint32_t> indices);
  static PcrSelection range(std::uint32_t first, std::uint32_t last);
  static PcrSelection from_bytes(BytesView b3);

  void set(std::uint32_t index);
  bool test(std::uint32_t index) const;
  std::size_t count() const;
  const std::array<std::uint8_t, 3>& bits() const { return bits_; }

  bool operator==(const PcrSelection&) const = default;

 private:
  std::array<std::uint8_t, 3> bits_{};
};

inline constexpr std::uint32_t kQuoteMagic = 0xFF544347;
inline constexpr std::size_t kMaxQualifyingData = 64;

struct QuoteBody {
  std::uint32_t magic = kQuoteMagic;
  Bytes qualifying_data;   // verifier nonce, <= 64 bytes
  PcrSelection selection;
  Bytes pcr_digest;        // SHA-256 over selected SHA256-bank values, ascending

  bool operator==(const QuoteBody&) const = default;
};

struct Quote {
  QuoteBody body;
  Bytes signature;  // over SHA-256(encode_quote_body(body)), under AK

  bool operator==(const Quote&) const = default;
};

// Deterministic TLV serialization used as the signing preimage:
// tags 0x10 magic, 0x11 qualifying_data, 0x12 selection, 0x13 pcr_digest.
Bytes encode_quote_body(const QuoteBody& body);
QuoteBody decode_quote_body(BytesView b);
Bytes encode_quote(const Quote& q);
Quote decode_quote(BytesView b);

/// SHA-256 over the concatenation of the selected PCR values in ascending
/// index order. Shared definition for quote generation and verification.
Bytes pcr_composite_digest(const PcrArray& values, const PcrSelection& sel);

inline constexpr std::size_t kMaxNvData = 8 * 1024;
inline constexpr std::uint32_t kNvIndexEkCert = 0x01;
inline constexpr std::uint32_t kNvIndexOwner = 0x02;
inline constexpr std::uint32_t kNvIndexPlatformCert = 0x03;

/// In-process TPM 2.0 stand-in: SHA1 + SHA256 PCR banks, NV storage, and an
/// EK/AK key hierarchy derived deterministically from a device seed.
///
/// Single-writer: mutating calls must be serialized per device. Reads of
/// public keys and NV snapshots are safe alongside no writer.
class TpmDevice {
 public:
  TpmDevice();

  const PcrBank& bank(cel::HashAlg alg) const;

  // new value = H_bank(old value || digest value); other slots untouched.
  Bytes pcr_extend(cel::HashAlg bank, std::uint32_t index,
                   const cel::Digest& digest);

  bool at_reset() const;

  Quote quote(BytesView nonce, const PcrSelection& selection) const;

  void nv_write(std::uint32_t index, BytesView data);
  Bytes nv_read(std::uint32_t index) const;

  // Deterministic from the seed; re-creating with the same seed yields the
  // same keys. create_ak requires an EK.
  Bytes create_ek(BytesView seed);
  Bytes create_ak();
  bool has_ek() const { return ek_.has_value(); }
  bool has_ak() const { return ak_.has_value(); }
  const Bytes& ek_public() const;
  const Bytes& ak_public() const;
  // Signing handle for endorsement-side credential issuance; the private
  // half stays inside the key object.
  const crypto::SigningKey& ek_key() const;

  void take_ownership(BytesView owner_id);

  // reboot zeroes the PCR banks and keeps NV + keys; factory_reset clears
  // everything.
  void reboot();
  void factory_reset();

 private:
  PcrBank sha1_bank_;
  PcrBank sha256_bank_;
  std::map<std::uint32_t, Bytes> nv_;
  std::optional<crypto::SigningKey> ek_;
  std::optional<crypto::SigningKey> ak_;
  Bytes ek_seed_material_;
};

}  // namespace attest::tpm
