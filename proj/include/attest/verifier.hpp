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

#include <string>
#include <utility>
#include <vector>

#include "attest/bytes.hpp"
#include "attest/cel.hpp"
#include "attest/credential.hpp"
#include "attest/tpm.hpp"

namespace attest::verifier {

// The verifier's judgment engine: replays presented event logs into PCR
// values, compares them against enrolled golden measurements, verifies the
// quote by regeneration, and aggregates one verdict. Pure given its inputs;
// attestations may run concurrently against a golden-store snapshot.

/// SHA256-bank PCR values recomputed from a log, starting at all-zero.
struct ReplayResult {
  tpm::PcrArray pcr;

  static ReplayResult zero();
};

// Folds each record's SHA-256 digest into its pcr_index with the same
// extend semantics the device uses. Records lacking a SHA-256 digest are
// Errc::missing_sha256_digest.
ReplayResult replay_log(const cel::Log& log);
void replay_into(ReplayResult& state, const cel::Log& log);

struct RimEntry {
  std::uint32_t pcr_index = 0;
  Bytes digest;  // SHA-256

  bool operator==(const RimEntry&) const = default;
};

/// Per-device enrolled ground truth: golden log measurements, credential
/// fingerprints, and the AK public key.
struct GoldenTemplate {
  std::string device_id;
  std::vector<RimEntry> firmware_rim;  // expected recnum order
  std::vector<Bytes> ima_rim;          // SHA-256 digests, expected order
  std::vector<std::pair<cred::Role, cred::Fingerprint>> cert_fingerprints;
  Bytes ak_public;
  std::vector<std::pair<std::string, std::string>> device_info;

  const cred::Fingerprint* fingerprint_for(cred::Role role) const;
  bool operator==(const GoldenTemplate&) const = default;
};

enum class RimFindingKind { match, digest_mismatch, unexpected_record, missing_record };

const char* rim_finding_name(RimFindingKind k);

struct RimFinding {
  std::uint64_t recnum;
  RimFindingKind kind;
};

// Order-sensitive, record-level comparison against the golden template.
// Surplus log records are unexpected_record; unconsumed RIM entries are
// missing_record.
std::vector<RimFinding> compare_rim(const cel::Log& log,
                                    const GoldenTemplate& golden,
                                    cel::LogSource source);

struct CheckResult {
  bool passed = false;
  std::string detail;

  static CheckResult pass() { return {true, {}}; }
  static CheckResult fail(std::string detail) { return {false, std::move(detail)}; }
};

struct QuoteChecks {
  CheckResult quote_signature;
  CheckResult pcr_match;
  CheckResult nonce_match;
};

// quote_signature: signature over SHA-256(encoded body) under ak_public.
// pcr_match: quoted digest equals the composite digest of the replayed PCR
// values at the quote's own selection. nonce_match: qualifying data equals
// the expected nonce.
QuoteChecks verify_quote(const tpm::Quote& quote, BytesView ak_public,
                         BytesView expected_nonce, const ReplayResult& replay);

enum class CheckId {
  cert_chain,
  binding,
  nv_certs,
  firmware_log,
  ima_log,
  quote_signature,
  pcr_match,
  nonce_match,
};

const char* check_name(CheckId id);

struct AttestationVerdict {
  std::vector<std::pair<CheckId, CheckResult>> checks;

  bool overall() const;
  const CheckResult& check(CheckId id) const;
  std::string render_text() const;
  std::string to_json() const;
  static AttestationVerdict from_json(const std::string& json);
};

/// Everything the prover presents at attestation time.
struct Bundle {
  std::vector<cred::Credential> credentials;
  Bytes nv_ek_cert;        // raw NV copy
  Bytes nv_platform_cert;  // raw NV copy
  cel::Log firmware_log;
  cel::Log ima_log;
  tpm::Quote quote;
};

// Runs every check and aggregates: overall passes iff all eight checks pass.
AttestationVerdict attest(const Bundle& bundle, const GoldenTemplate& golden,
                          BytesView expected_nonce,
                          const cred::TrustAnchorSet& anchors);

}  // namespace attest::verifier
