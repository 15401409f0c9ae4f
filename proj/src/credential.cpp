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

#include "attest/credential.hpp"

#include <algorithm>
#include <mutex>

#include "attest/error.hpp"
#include "attest/tlv.hpp"

namespace attest::cred {

namespace {

constexpr std::uint8_t kTagSerial = 0x20;
constexpr std::uint8_t kTagRole = 0x21;
constexpr std::uint8_t kTagSubject = 0x22;
constexpr std::uint8_t kTagIssuerSerial = 0x23;
constexpr std::uint8_t kTagPublicKey = 0x24;
constexpr std::uint8_t kTagAttributes = 0x25;
constexpr std::uint8_t kTagBoundRefs = 0x26;
constexpr std::uint8_t kTagSignature = 0x27;

constexpr std::uint8_t kTagEntry = 0x01;

Bytes encode_attributes(
    const std::vector<std::pair<std::string, std::string>>& attrs) {
  tlv::Writer w;
  for (const auto& [key, value] : attrs) {
    if (key.find('\0') != std::string::npos) {
      raise(Errc::invalid_argument, "attribute key contains NUL");
    }
    Bytes entry = to_bytes(key);
    entry.push_back(0x00);
    append(entry, to_bytes(value));
    w.field(kTagEntry, entry);
  }
  return w.take();
}

std::vector<std::pair<std::string, std::string>> decode_attributes(BytesView b) {
  std::vector<std::pair<std::string, std::string>> attrs;
  tlv::Reader rd(b);
  while (!rd.done()) {
    tlv::Field f = rd.expect(kTagEntry);
    auto nul = std::find(f.value.begin(), f.value.end(), std::uint8_t{0});
    if (nul == f.value.end()) {
      raise(Errc::malformed_message, "attribute entry lacks key separator");
    }
    attrs.emplace_back(std::string(f.value.begin(), nul),
                       std::string(nul + 1, f.value.end()));
  }
  return attrs;
}

Bytes encode_bound_refs(const std::vector<BoundRef>& refs) {
  tlv::Writer w;
  for (const BoundRef& r : refs) {
    Bytes entry;
    entry.push_back(static_cast<std::uint8_t>(r.role));
    append(entry, fingerprint_view(r.fingerprint));
    w.field(kTagEntry, entry);
  }
  return w.take();
}

Role role_from_byte(std::uint8_t b) {
  if (b > static_cast<std::uint8_t>(Role::ak)) {
    raise(Errc::malformed_message, "unknown credential role " + std::to_string(b));
  }
  return static_cast<Role>(b);
}

std::vector<BoundRef> decode_bound_refs(BytesView b) {
  std::vector<BoundRef> refs;
  tlv::Reader rd(b);
  while (!rd.done()) {
    tlv::Field f = rd.expect(kTagEntry);
    if (f.value.size() != 1 + std::tuple_size<Fingerprint>::value) {
      raise(Errc::malformed_message, "bound ref must be role byte + 32 bytes");
    }
    BoundRef r;
    r.role = role_from_byte(f.value[0]);
    std::copy(f.value.begin() + 1, f.value.end(), r.fingerprint.begin());
    refs.push_back(r);
  }
  return refs;
}

Bytes encode_fields(const Credential& c, bool with_signature) {
  tlv::Writer w;
  w.field_u64(kTagSerial, c.serial);
  Bytes role{static_cast<std::uint8_t>(c.role)};
  w.field(kTagRole, role);
  w.field(kTagSubject, to_bytes(c.subject));
  w.field_u64(kTagIssuerSerial, c.issuer_serial);
  w.field(kTagPublicKey, c.public_key);
  w.field(kTagAttributes, encode_attributes(c.attributes));
  w.field(kTagBoundRefs, encode_bound_refs(c.bound_refs));
  if (with_signature) {
    w.field(kTagSignature, c.signature);
  }
  return w.take();
}

void check_attribute_schema(const CredentialTemplate& tmpl) {
  if (tmpl.role != Role::platform_attributes) return;
  for (const auto& [key, value] : tmpl.attributes) {
    if (key.rfind("component.", 0) != 0) continue;
    if (key.size() > 8 && key.compare(key.size() - 8, 8, ".mutable") == 0) {
      if (value != "true" && value != "false") {
        raise(Errc::invalid_argument,
              "attribute " + key + " must be 'true' or 'false'");
      }
    }
  }
}

}  // namespace

const char* role_name(Role role) {
  switch (role) {
    case Role::root_ca: return "root_ca";
    case Role::tpm_vendor_ca: return "tpm_vendor_ca";
    case Role::ek: return "ek";
    case Role::platform: return "platform";
    case Role::platform_attributes: return "platform_attributes";
    case Role::ak: return "ak";
  }
  return "unknown";
}

Bytes encode_credential(const Credential& c) { return encode_fields(c, true); }

Bytes encode_credential_preimage(const Credential& c) {
  return encode_fields(c, false);
}

Credential decode_credential(BytesView b) {
  tlv::Reader rd(b);
  Credential c;
  c.serial = rd.expect_u64(kTagSerial);
  tlv::Field role = rd.expect(kTagRole);
  if (role.value.size() != 1) {
    raise(Errc::malformed_message, "role field must be one byte");
  }
  c.role = role_from_byte(role.value[0]);
  c.subject = to_string(rd.expect(kTagSubject).value);
  c.issuer_serial = rd.expect_u64(kTagIssuerSerial);
  tlv::Field pk = rd.expect(kTagPublicKey);
  c.public_key = Bytes(pk.value.begin(), pk.value.end());
  c.attributes = decode_attributes(rd.expect(kTagAttributes).value);
  c.bound_refs = decode_bound_refs(rd.expect(kTagBoundRefs).value);
  tlv::Field sig = rd.expect(kTagSignature);
  c.signature = Bytes(sig.value.begin(), sig.value.end());
  if (!rd.done()) {
    raise(Errc::malformed_message, "trailing bytes after credential");
  }
  return c;
}

Fingerprint fingerprint(const Credential& c) {
  Bytes digest = crypto::sha256(encode_credential_preimage(c));
  Fingerprint fp;
  std::copy(digest.begin(), digest.end(), fp.begin());
  return fp;
}

bool may_issue(Role issuer, Role subject) {
  switch (issuer) {
    case Role::root_ca:
      return subject == Role::root_ca || subject == Role::tpm_vendor_ca ||
             subject == Role::platform || subject == Role::platform_attributes;
    case Role::tpm_vendor_ca:
      return subject == Role::ek;
    case Role::ek:
      return subject == Role::ak;
    default:
      return false;
  }
}

Credential issue(const Credential& issuer, const crypto::SigningKey& issuer_key,
                 const CredentialTemplate& tmpl) {
  if (!may_issue(issuer.role, tmpl.role)) {
    raise(Errc::role_violation, std::string(role_name(issuer.role)) +
                                    " may not issue " + role_name(tmpl.role));
  }
  check_attribute_schema(tmpl);
  Credential c;
  c.serial = tmpl.serial;
  c.role = tmpl.role;
  c.subject = tmpl.subject;
  c.issuer_serial = issuer.serial;
  c.public_key = tmpl.public_key;
  c.attributes = tmpl.attributes;
  c.bound_refs = tmpl.bound_refs;
  c.signature = issuer_key.sign(fingerprint_view(fingerprint(c)));
  return c;
}

Credential self_issue_root(const crypto::SigningKey& key, std::uint64_t serial,
                           std::string subject) {
  Credential c;
  c.serial = serial;
  c.role = Role::root_ca;
  c.subject = std::move(subject);
  c.issuer_serial = serial;
  c.public_key = key.public_key();
  c.signature = key.sign(fingerprint_view(fingerprint(c)));
  return c;
}

bool verify_signature(const Credential& subject, const Credential& issuer) {
  return crypto::verify(issuer.public_key,
                        fingerprint_view(fingerprint(subject)),
                        subject.signature);
}

void CredentialStore::add(const Credential& c) {
  std::unique_lock lock(mutex_);
  auto [it, inserted] = by_serial_.emplace(c.serial, c);
  if (!inserted && !(it->second == c)) {
    raise(Errc::invalid_argument,
          "serial collision on " + std::to_string(c.serial));
  }
}

const Credential* CredentialStore::find(std::uint64_t serial) const {
  std::shared_lock lock(mutex_);
  auto it = by_serial_.find(serial);
  return it == by_serial_.end() ? nullptr : &it->second;
}

const Credential* CredentialStore::find_role(Role role) const {
  std::shared_lock lock(mutex_);
  for (const auto& [serial, c] : by_serial_) {
    if (c.role == role) return &c;
  }
  return nullptr;
}

std::vector<Credential> CredentialStore::all() const {
  std::shared_lock lock(mutex_);
  std::vector<Credential> out;
  out.reserve(by_serial_.size());
  for (const auto& [serial, c] : by_serial_) out.push_back(c);
  return out;
}

std::size_t CredentialStore::size() const {
  std::shared_lock lock(mutex_);
  return by_serial_.size();
}

void TrustAnchorSet::add(const Credential& root) {
  if (root.role != Role::root_ca) {
    raise(Errc::bad_config, "trust anchor must be a root_ca credential");
  }
  fingerprints.insert(fingerprint(root));
}

const char* chain_status_name(ChainStatus s) {
  switch (s) {
    case ChainStatus::ok: return "ok";
    case ChainStatus::bad_signature: return "bad_signature";
    case ChainStatus::unknown_issuer: return "unknown_issuer";
    case ChainStatus::role_violation: return "role_violation";
  }
  return "unknown";
}

ChainResult validate_chain(const Credential& leaf, const CredentialStore& store,
                           const TrustAnchorSet& anchors) {
  ChainResult result;
  const Credential* current = &leaf;
  result.path.push_back(current->serial);
  for (std::size_t depth = 0; depth < kMaxChainDepth; ++depth) {
    const Credential* issuer =
        current->self_signed() ? current : store.find(current->issuer_serial);
    if (issuer == nullptr) {
      result.status = ChainStatus::unknown_issuer;
      return result;
    }
    if (!may_issue(issuer->role, current->role)) {
      result.status = ChainStatus::role_violation;
      return result;
    }
    if (!verify_signature(*current, *issuer)) {
      result.status = ChainStatus::bad_signature;
      return result;
    }
    if (anchors.contains(fingerprint(*issuer))) {
      if (issuer != current) result.path.push_back(issuer->serial);
      result.status = ChainStatus::ok;
      return result;
    }
    if (issuer == current) {
      // Self-signed but not an installed anchor.
      result.status = ChainStatus::unknown_issuer;
      return result;
    }
    current = issuer;
    result.path.push_back(current->serial);
  }
  result.status = ChainStatus::unknown_issuer;
  return result;
}

const char* binding_status_name(BindingStatus s) {
  switch (s) {
    case BindingStatus::ok: return "ok";
    case BindingStatus::ek_mismatch: return "ek_mismatch";
    case BindingStatus::attr_mismatch: return "attr_mismatch";
  }
  return "unknown";
}

BindingStatus validate_binding(const Credential& platform,
                               const Credential& attrs, const Credential& ek) {
  BoundRef want_ek{Role::ek, fingerprint(ek)};
  if (std::find(platform.bound_refs.begin(), platform.bound_refs.end(),
                want_ek) == platform.bound_refs.end()) {
    return BindingStatus::ek_mismatch;
  }
  BoundRef want_platform{Role::platform, fingerprint(platform)};
  if (std::find(attrs.bound_refs.begin(), attrs.bound_refs.end(),
                want_platform) == attrs.bound_refs.end()) {
    return BindingStatus::attr_mismatch;
  }
  return BindingStatus::ok;
}

Credential certify_ak(const Credential& ek_cred,
                      const crypto::SigningKey& ek_key, BytesView ak_public,
                      std::uint64_t serial, std::string subject) {
  CredentialTemplate tmpl;
  tmpl.serial = serial;
  tmpl.role = Role::ak;
  tmpl.subject = std::move(subject);
  tmpl.public_key = Bytes(ak_public.begin(), ak_public.end());
  return issue(ek_cred, ek_key, tmpl);
}

}  // namespace attest::cred
