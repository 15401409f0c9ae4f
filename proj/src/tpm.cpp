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

#include "attest/tpm.hpp"

#include <algorithm>
#include <string>

#include "attest/error.hpp"
#include "attest/tlv.hpp"

namespace attest::tpm {

namespace {

constexpr std::uint8_t kTagMagic = 0x10;
constexpr std::uint8_t kTagQualifyingData = 0x11;
constexpr std::uint8_t kTagSelection = 0x12;
constexpr std::uint8_t kTagPcrDigest = 0x13;

constexpr std::uint8_t kTagQuoteBody = 0x01;
constexpr std::uint8_t kTagQuoteSignature = 0x02;

Bytes hash_for(cel::HashAlg alg, BytesView data) {
  return alg == cel::HashAlg::sha1 ? crypto::sha1(data) : crypto::sha256(data);
}

Bytes derive_seed(const char* label, BytesView material) {
  Bytes preimage = to_bytes(label);
  append(preimage, material);
  return crypto::sha256(preimage);
}

}  // namespace

PcrBank PcrBank::reset_state(cel::HashAlg alg) {
  PcrBank bank{alg, {}};
  for (Bytes& slot : bank.values) {
    slot.assign(cel::digest_length(alg), 0);
  }
  return bank;
}

PcrSelection PcrSelection::of(std::initializer_list<std::uint32_t> indices) {
  PcrSelection sel;
  for (std::uint32_t i : indices) sel.set(i);
  return sel;
}

PcrSelection PcrSelection::range(std::uint32_t first, std::uint32_t last) {
  PcrSelection sel;
  for (std::uint32_t i = first; i <= last; ++i) sel.set(i);
  return sel;
}

PcrSelection PcrSelection::from_bytes(BytesView b3) {
  if (b3.size() != 3) {
    raise(Errc::malformed_message, "pcr selection must be 3 bytes");
  }
  PcrSelection sel;
  std::copy(b3.begin(), b3.end(), sel.bits_.begin());
  return sel;
}

void PcrSelection::set(std::uint32_t index) {
  if (index >= cel::kPcrCount) {
    raise(Errc::index_out_of_range, "pcr " + std::to_string(index));
  }
  bits_[index / 8] |= static_cast<std::uint8_t>(1u << (index % 8));
}

bool PcrSelection::test(std::uint32_t index) const {
  if (index >= cel::kPcrCount) return false;
  return (bits_[index / 8] >> (index % 8)) & 1u;
}

std::size_t PcrSelection::count() const {
  std::size_t n = 0;
  for (std::uint32_t i = 0; i < cel::kPcrCount; ++i) {
    if (test(i)) ++n;
  }
  return n;
}

Bytes encode_quote_body(const QuoteBody& body) {
  tlv::Writer w;
  w.field_u32(kTagMagic, body.magic);
  w.field(kTagQualifyingData, body.qualifying_data);
  w.field(kTagSelection, body.selection.bits());
  w.field(kTagPcrDigest, body.pcr_digest);
  return w.take();
}

QuoteBody decode_quote_body(BytesView b) {
  tlv::Reader rd(b);
  QuoteBody body;
  body.magic = rd.expect_u32(kTagMagic);
  if (body.magic != kQuoteMagic) {
    raise(Errc::malformed_message, "quote magic mismatch");
  }
  tlv::Field qd = rd.expect(kTagQualifyingData);
  if (qd.value.size() > kMaxQualifyingData) {
    raise(Errc::malformed_message, "qualifying data exceeds 64 bytes");
  }
  body.qualifying_data = Bytes(qd.value.begin(), qd.value.end());
  body.selection = PcrSelection::from_bytes(rd.expect(kTagSelection).value);
  tlv::Field digest = rd.expect(kTagPcrDigest);
  if (digest.value.size() != crypto::kSha256Len) {
    raise(Errc::malformed_message, "pcr digest must be 32 bytes");
  }
  body.pcr_digest = Bytes(digest.value.begin(), digest.value.end());
  if (!rd.done()) {
    raise(Errc::malformed_message, "trailing bytes after quote body");
  }
  return body;
}

Bytes encode_quote(const Quote& q) {
  tlv::Writer w;
  w.field(kTagQuoteBody, encode_quote_body(q.body));
  w.field(kTagQuoteSignature, q.signature);
  return w.take();
}

Quote decode_quote(BytesView b) {
  tlv::Reader rd(b);
  Quote q;
  q.body = decode_quote_body(rd.expect(kTagQuoteBody).value);
  tlv::Field sig = rd.expect(kTagQuoteSignature);
  q.signature = Bytes(sig.value.begin(), sig.value.end());
  if (!rd.done()) {
    raise(Errc::malformed_message, "trailing bytes after quote");
  }
  return q;
}

Bytes pcr_composite_digest(const PcrArray& values, const PcrSelection& sel) {
  Bytes concat;
  for (std::uint32_t i = 0; i < cel::kPcrCount; ++i) {
    if (sel.test(i)) append(concat, values[i]);
  }
  return crypto::sha256(concat);
}

TpmDevice::TpmDevice()
    : sha1_bank_(PcrBank::reset_state(cel::HashAlg::sha1)),
      sha256_bank_(PcrBank::reset_state(cel::HashAlg::sha256)) {}

const PcrBank& TpmDevice::bank(cel::HashAlg alg) const {
  return alg == cel::HashAlg::sha1 ? sha1_bank_ : sha256_bank_;
}

Bytes TpmDevice::pcr_extend(cel::HashAlg bank_alg, std::uint32_t index,
                            const cel::Digest& digest) {
  if (digest.alg != bank_alg) {
    raise(Errc::bank_mismatch, "digest algorithm does not match bank");
  }
  if (index >= cel::kPcrCount) {
    raise(Errc::index_out_of_range, "pcr " + std::to_string(index));
  }
  PcrBank& bank = bank_alg == cel::HashAlg::sha1 ? sha1_bank_ : sha256_bank_;
  Bytes preimage = bank.values[index];
  append(preimage, digest.value);
  bank.values[index] = hash_for(bank_alg, preimage);
  return bank.values[index];
}

bool TpmDevice::at_reset() const {
  auto all_zero = [](const PcrBank& bank) {
    for (const Bytes& v : bank.values) {
      for (std::uint8_t b : v) {
        if (b != 0) return false;
      }
    }
    return true;
  };
  return all_zero(sha1_bank_) && all_zero(sha256_bank_);
}

Quote TpmDevice::quote(BytesView nonce, const PcrSelection& selection) const {
  if (!ak_) {
    raise(Errc::no_attestation_key, "create_ak before quoting");
  }
  if (nonce.size() > kMaxQualifyingData) {
    raise(Errc::invalid_argument, "nonce exceeds 64 bytes");
  }
  QuoteBody body;
  body.qualifying_data = Bytes(nonce.begin(), nonce.end());
  body.selection = selection;
  body.pcr_digest = pcr_composite_digest(sha256_bank_.values, selection);
  Bytes message = crypto::sha256(encode_quote_body(body));
  return Quote{std::move(body), ak_->sign(message)};
}

void TpmDevice::nv_write(std::uint32_t index, BytesView data) {
  if (data.size() > kMaxNvData) {
    raise(Errc::nv_too_large, "nv data exceeds 8 KiB");
  }
  nv_[index] = Bytes(data.begin(), data.end());
}

Bytes TpmDevice::nv_read(std::uint32_t index) const {
  auto it = nv_.find(index);
  if (it == nv_.end()) {
    raise(Errc::nv_index_absent, "nv index " + std::to_string(index));
  }
  return it->second;
}

Bytes TpmDevice::create_ek(BytesView seed) {
  ek_seed_material_ = derive_seed("attest-tpm-ek", seed);
  ek_ = crypto::SigningKey::from_seed(ek_seed_material_);
  ak_.reset();
  return ek_->public_key();
}

Bytes TpmDevice::create_ak() {
  if (!ek_) {
    raise(Errc::ek_missing, "create_ek before create_ak");
  }
  ak_ = crypto::SigningKey::from_seed(
      derive_seed("attest-tpm-ak", ek_seed_material_));
  return ak_->public_key();
}

const Bytes& TpmDevice::ek_public() const {
  if (!ek_) raise(Errc::ek_missing, "no endorsement key");
  return ek_->public_key();
}

const Bytes& TpmDevice::ak_public() const {
  if (!ak_) raise(Errc::no_attestation_key, "no attestation key");
  return ak_->public_key();
}

const crypto::SigningKey& TpmDevice::ek_key() const {
  if (!ek_) raise(Errc::ek_missing, "no endorsement key");
  return *ek_;
}

void TpmDevice::take_ownership(BytesView owner_id) {
  nv_write(kNvIndexOwner, owner_id);
}

void TpmDevice::reboot() {
  sha1_bank_ = PcrBank::reset_state(cel::HashAlg::sha1);
  sha256_bank_ = PcrBank::reset_state(cel::HashAlg::sha256);
}

void TpmDevice::factory_reset() {
  reboot();
  nv_.clear();
  ek_.reset();
  ak_.reset();
  ek_seed_material_.clear();
}

}  // namespace attest::tpm
