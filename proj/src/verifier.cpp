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

#include "attest/verifier.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

#include "attest/crypto.hpp"
#include "attest/error.hpp"

namespace attest::verifier {

ReplayResult ReplayResult::zero() {
  ReplayResult r;
  for (Bytes& slot : r.pcr) {
    slot.assign(crypto::kSha256Len, 0);
  }
  return r;
}

void replay_into(ReplayResult& state, const cel::Log& log) {
  for (const cel::Record& rec : log.records) {
    const cel::Digest* d = rec.find_digest(cel::HashAlg::sha256);
    if (d == nullptr) {
      raise(Errc::missing_sha256_digest,
            "record " + std::to_string(rec.recnum) + " carries no SHA-256 digest");
    }
    Bytes preimage = state.pcr[rec.pcr_index];
    append(preimage, d->value);
    state.pcr[rec.pcr_index] = crypto::sha256(preimage);
  }
}

ReplayResult replay_log(const cel::Log& log) {
  ReplayResult state = ReplayResult::zero();
  replay_into(state, log);
  return state;
}

const cred::Fingerprint* GoldenTemplate::fingerprint_for(cred::Role role) const {
  for (const auto& [r, fp] : cert_fingerprints) {
    if (r == role) return &fp;
  }
  return nullptr;
}

const char* rim_finding_name(RimFindingKind k) {
  switch (k) {
    case RimFindingKind::match: return "match";
    case RimFindingKind::digest_mismatch: return "digest_mismatch";
    case RimFindingKind::unexpected_record: return "unexpected_record";
    case RimFindingKind::missing_record: return "missing_record";
  }
  return "unknown";
}

std::vector<RimFinding> compare_rim(const cel::Log& log,
                                    const GoldenTemplate& golden,
                                    cel::LogSource source) {
  std::vector<RimFinding> findings;
  std::size_t n_log = log.records.size();
  std::size_t n_rim = source == cel::LogSource::firmware
                          ? golden.firmware_rim.size()
                          : golden.ima_rim.size();
  for (std::size_t i = 0; i < std::max(n_log, n_rim); ++i) {
    if (i >= n_rim) {
      findings.push_back({log.records[i].recnum, RimFindingKind::unexpected_record});
      continue;
    }
    if (i >= n_log) {
      findings.push_back({i, RimFindingKind::missing_record});
      continue;
    }
    const cel::Record& rec = log.records[i];
    const cel::Digest* d = rec.find_digest(cel::HashAlg::sha256);
    bool match;
    if (source == cel::LogSource::firmware) {
      const RimEntry& want = golden.firmware_rim[i];
      match = d != nullptr && rec.pcr_index == want.pcr_index &&
              d->value == want.digest;
    } else {
      match = d != nullptr && d->value == golden.ima_rim[i];
    }
    findings.push_back(
        {rec.recnum, match ? RimFindingKind::match : RimFindingKind::digest_mismatch});
  }
  return findings;
}

QuoteChecks verify_quote(const tpm::Quote& quote, BytesView ak_public,
                         BytesView expected_nonce, const ReplayResult& replay) {
  QuoteChecks checks;
  Bytes message = crypto::sha256(tpm::encode_quote_body(quote.body));
  checks.quote_signature =
      crypto::verify(ak_public, message, quote.signature)
          ? CheckResult::pass()
          : CheckResult::fail("signature does not verify under enrolled AK");
  checks.nonce_match =
      std::equal(quote.body.qualifying_data.begin(),
                 quote.body.qualifying_data.end(), expected_nonce.begin(),
                 expected_nonce.end())
          ? CheckResult::pass()
          : CheckResult::fail("qualifying data does not match expected nonce");
  Bytes regenerated =
      tpm::pcr_composite_digest(replay.pcr, quote.body.selection);
  checks.pcr_match =
      regenerated == quote.body.pcr_digest
          ? CheckResult::pass()
          : CheckResult::fail("replayed PCR digest differs from quoted digest");
  return checks;
}

const char* check_name(CheckId id) {
  switch (id) {
    case CheckId::cert_chain: return "cert_chain";
    case CheckId::binding: return "binding";
    case CheckId::nv_certs: return "nv_certs";
    case CheckId::firmware_log: return "firmware_log";
    case CheckId::ima_log: return "ima_log";
    case CheckId::quote_signature: return "quote_signature";
    case CheckId::pcr_match: return "pcr_match";
    case CheckId::nonce_match: return "nonce_match";
  }
  return "unknown";
}

bool AttestationVerdict::overall() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(),
                     [](const auto& c) { return c.second.passed; });
}

const CheckResult& AttestationVerdict::check(CheckId id) const {
  for (const auto& [cid, result] : checks) {
    if (cid == id) return result;
  }
  raise(Errc::invalid_argument, "verdict lacks check " + std::string(check_name(id)));
}

std::string AttestationVerdict::render_text() const {
  std::ostringstream out;
  for (const auto& [id, result] : checks) {
    out << check_name(id) << ": "
        << (result.passed ? "pass" : "fail: " + result.detail) << "\n";
  }
  out << "overall: " << (overall() ? "pass" : "fail") << "\n";
  return out.str();
}

std::string AttestationVerdict::to_json() const {
  nlohmann::ordered_json doc;
  for (const auto& [id, result] : checks) {
    doc[check_name(id)] = result.passed ? "pass" : "fail: " + result.detail;
  }
  doc["overall"] = overall() ? "pass" : "fail";
  return doc.dump();
}

AttestationVerdict AttestationVerdict::from_json(const std::string& json) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::malformed_message, std::string("verdict document: ") + e.what());
  }
  AttestationVerdict verdict;
  constexpr CheckId kAll[] = {
      CheckId::cert_chain,     CheckId::binding,    CheckId::nv_certs,
      CheckId::firmware_log,   CheckId::ima_log,    CheckId::quote_signature,
      CheckId::pcr_match,      CheckId::nonce_match};
  for (CheckId id : kAll) {
    auto it = doc.find(check_name(id));
    if (it == doc.end() || !it->is_string()) {
      raise(Errc::malformed_message,
            "verdict document lacks check " + std::string(check_name(id)));
    }
    std::string value = it->get<std::string>();
    if (value == "pass") {
      verdict.checks.emplace_back(id, CheckResult::pass());
    } else if (value.rfind("fail", 0) == 0) {
      std::string detail = value.size() > 6 ? value.substr(6) : "";
      verdict.checks.emplace_back(id, CheckResult::fail(detail));
    } else {
      raise(Errc::malformed_message, "check value must be pass or fail");
    }
  }
  return verdict;
}

namespace {

std::string summarize_rim(const std::vector<RimFinding>& findings,
                          const cel::SourceReport& source_report) {
  std::ostringstream out;
  for (const auto& f : source_report.offending) {
    out << "pcr " << f.pcr_index << " out of range at recnum " << f.recnum << "; ";
  }
  for (const auto& f : findings) {
    if (f.kind == RimFindingKind::match) continue;
    out << rim_finding_name(f.kind) << " at recnum " << f.recnum << "; ";
  }
  std::string s = out.str();
  if (s.size() >= 2) s.resize(s.size() - 2);
  return s;
}

CheckResult log_check(const cel::Log& log, const GoldenTemplate& golden,
                      cel::LogSource source) {
  cel::SourceReport report = cel::validate_log_for_source(log, source);
  std::vector<RimFinding> findings = compare_rim(log, golden, source);
  bool all_match =
      std::all_of(findings.begin(), findings.end(),
                  [](const RimFinding& f) { return f.kind == RimFindingKind::match; });
  if (report.ok() && all_match) return CheckResult::pass();
  return CheckResult::fail(summarize_rim(findings, report));
}

const cred::Credential* find_role(const std::vector<cred::Credential>& creds,
                                  cred::Role role) {
  for (const cred::Credential& c : creds) {
    if (c.role == role) return &c;
  }
  return nullptr;
}

}  // namespace

AttestationVerdict attest(const Bundle& bundle, const GoldenTemplate& golden,
                          BytesView expected_nonce,
                          const cred::TrustAnchorSet& anchors) {
  AttestationVerdict verdict;

  cred::CredentialStore store;
  bool store_ok = true;
  std::string store_detail;
  for (const cred::Credential& c : bundle.credentials) {
    try {
      store.add(c);
    } catch (const Error& e) {
      store_ok = false;
      store_detail = e.what();
    }
  }

  const cred::Credential* ek = find_role(bundle.credentials, cred::Role::ek);
  const cred::Credential* platform =
      find_role(bundle.credentials, cred::Role::platform);
  const cred::Credential* attrs =
      find_role(bundle.credentials, cred::Role::platform_attributes);
  const cred::Credential* ak = find_role(bundle.credentials, cred::Role::ak);

  // cert_chain: every presented leaf must chain to an installed anchor.
  {
    std::ostringstream detail;
    bool ok = store_ok;
    if (!store_ok) detail << store_detail << "; ";
    struct Leaf {
      const char* name;
      const cred::Credential* c;
    } leaves[] = {{"ek", ek}, {"platform", platform}, {"platform_attributes", attrs}, {"ak", ak}};
    for (const Leaf& leaf : leaves) {
      if (leaf.c == nullptr) {
        ok = false;
        detail << leaf.name << ": missing; ";
        continue;
      }
      cred::ChainResult r = cred::validate_chain(*leaf.c, store, anchors);
      if (!r.ok()) {
        ok = false;
        detail << leaf.name << ": " << cred::chain_status_name(r.status) << "; ";
      }
    }
    std::string d = detail.str();
    if (d.size() >= 2) d.resize(d.size() - 2);
    verdict.checks.emplace_back(CheckId::cert_chain,
                                ok ? CheckResult::pass() : CheckResult::fail(d));
  }

  // binding: structural cross-references, judged independently of chain
  // status so a chain fault does not also read as a binding fault.
  {
    CheckResult result;
    if (ek && platform && attrs) {
      cred::BindingStatus s = cred::validate_binding(*platform, *attrs, *ek);
      result = s == cred::BindingStatus::ok
                   ? CheckResult::pass()
                   : CheckResult::fail(cred::binding_status_name(s));
    } else {
      result = CheckResult::fail("credentials missing for binding check");
    }
    verdict.checks.emplace_back(CheckId::binding, std::move(result));
  }

  // nv_certs: NV copies must carry the enrolled EK and platform credentials.
  {
    CheckResult result = CheckResult::pass();
    auto check_copy = [&](BytesView raw, cred::Role role, const char* name) {
      if (!result.passed) return;
      const cred::Fingerprint* want = golden.fingerprint_for(role);
      if (want == nullptr) {
        result = CheckResult::fail(std::string("no enrolled fingerprint for ") + name);
        return;
      }
      try {
        cred::Credential c = cred::decode_credential(raw);
        if (fingerprint(c) != *want) {
          result = CheckResult::fail(std::string(name) +
                                     " NV copy differs from enrolled credential");
        }
      } catch (const Error& e) {
        result = CheckResult::fail(std::string(name) + " NV copy undecodable: " + e.what());
      }
    };
    check_copy(bundle.nv_ek_cert, cred::Role::ek, "ek");
    check_copy(bundle.nv_platform_cert, cred::Role::platform, "platform");
    verdict.checks.emplace_back(CheckId::nv_certs, std::move(result));
  }

  verdict.checks.emplace_back(
      CheckId::firmware_log,
      log_check(bundle.firmware_log, golden, cel::LogSource::firmware));
  verdict.checks.emplace_back(
      CheckId::ima_log, log_check(bundle.ima_log, golden, cel::LogSource::ima));

  // Quote regeneration over the presented logs.
  {
    QuoteChecks quote_checks;
    try {
      ReplayResult replay = ReplayResult::zero();
      replay_into(replay, bundle.firmware_log);
      replay_into(replay, bundle.ima_log);
      quote_checks =
          verify_quote(bundle.quote, golden.ak_public, expected_nonce, replay);
    } catch (const Error& e) {
      quote_checks = verify_quote(bundle.quote, golden.ak_public, expected_nonce,
                                  ReplayResult::zero());
      quote_checks.pcr_match =
          CheckResult::fail(std::string("replay failed: ") + e.what());
    }
    verdict.checks.emplace_back(CheckId::quote_signature,
                                std::move(quote_checks.quote_signature));
    verdict.checks.emplace_back(CheckId::pcr_match,
                                std::move(quote_checks.pcr_match));
    verdict.checks.emplace_back(CheckId::nonce_match,
                                std::move(quote_checks.nonce_match));
  }

  return verdict;
}

}  // namespace attest::verifier
