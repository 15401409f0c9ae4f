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
#include <set>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "attest/bytes.hpp"
#include "attest/crypto.hpp"

namespace attest::cred {

// Supplier-certificate hierarchy modelling platform provenance. Credentials
// use a custom canonical TLV encoding (tags 0x20-0x27, fixed order) rather
// than X.509 so fingerprints stay bit-exact without ASN.1.

enum class Role : std::uint8_t {
  root_ca = 0,
  tpm_vendor_ca = 1,
  ek = 2,
  platform = 3,
  platform_attributes = 4,
  ak = 5,
};

const char* role_name(Role role);

using Fingerprint = std::array<std::uint8_t, 32>;

struct BoundRef {
  Role role;
  Fingerprint fingerprint;

  bool operator==(const BoundRef&) const = default;
};

struct Credential {
  std::uint64_t serial = 0;
  Role role = Role::root_ca;
  std::string subject;
  std::uint64_t issuer_serial = 0;
  Bytes public_key;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<BoundRef> bound_refs;
  Bytes signature;  // issuer signature over fingerprint()

  bool self_signed() const { return issuer_serial == serial; }
  bool operator==(const Credential&) const = default;
};

Bytes encode_credential(const Credential& c);
// Canonical encoding with the signature field omitted; fingerprint preimage.
Bytes encode_credential_preimage(const Credential& c);
Credential decode_credential(BytesView b);

// SHA-256 over encode_credential_preimage(c).
Fingerprint fingerprint(const Credential& c);

inline BytesView fingerprint_view(const Fingerprint& fp) {
  return BytesView(fp.data(), fp.size());
}

// Issuance permissions: root_ca -> {root_ca(self), tpm_vendor_ca, platform,
// platform_attributes}; tpm_vendor_ca -> ek; ek -> ak.
bool may_issue(Role issuer, Role subject);

struct CredentialTemplate {
  std::uint64_t serial = 0;
  Role role = Role::ek;
  std::string subject;
  Bytes public_key;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<BoundRef> bound_refs;
};

// Throws Errc::role_violation when the issuer role may not issue the
// template role; platform_attributes templates must carry well-formed
// component.N.name / component.N.mutable attribute entries.
Credential issue(const Credential& issuer, const crypto::SigningKey& issuer_key,
                 const CredentialTemplate& tmpl);

Credential self_issue_root(const crypto::SigningKey& key, std::uint64_t serial,
                           std::string subject);

bool verify_signature(const Credential& subject, const Credential& issuer);

/// Serial-keyed credential lookup. Concurrent reads are fine; writes are
/// serialized internally.
class CredentialStore {
 public:
  // Throws Errc::invalid_argument on a serial collision with different bytes.
  void add(const Credential& c);
  const Credential* find(std::uint64_t serial) const;
  const Credential* find_role(Role role) const;
  std::vector<Credential> all() const;
  std::size_t size() const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::uint64_t, Credential> by_serial_;
};

struct TrustAnchorSet {
  std::set<Fingerprint> fingerprints;

  void add(const Credential& root);
  bool contains(const Fingerprint& fp) const {
    return fingerprints.count(fp) != 0;
  }
  bool empty() const { return fingerprints.empty(); }
  std::size_t size() const { return fingerprints.size(); }
};

enum class ChainStatus { ok, bad_signature, unknown_issuer, role_violation };

const char* chain_status_name(ChainStatus s);

struct ChainResult {
  ChainStatus status = ChainStatus::ok;
  // Serials from leaf to the anchor that terminated the walk (on ok).
  std::vector<std::uint64_t> path;

  bool ok() const { return status == ChainStatus::ok; }
};

inline constexpr std::size_t kMaxChainDepth = 8;

// Walks issuer links until a trust anchor, verifying each signature and the
// role matrix along the way. Findings land in the result, never as throws.
ChainResult validate_chain(const Credential& leaf, const CredentialStore& store,
                           const TrustAnchorSet& anchors);

enum class BindingStatus { ok, ek_mismatch, attr_mismatch };

const char* binding_status_name(BindingStatus s);

// ok iff the platform credential references the EK's fingerprint and the
// attributes credential references the platform's fingerprint.
BindingStatus validate_binding(const Credential& platform,
                               const Credential& attrs, const Credential& ek);

Credential certify_ak(const Credential& ek_cred,
                      const crypto::SigningKey& ek_key, BytesView ak_public,
                      std::uint64_t serial, std::string subject);

}  // namespace attest::cred
