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

#include "attest/service.hpp"

#include <fstream>
#include <sstream>

#include "attest/crypto.hpp"
#include "attest/error.hpp"
#include "attest/wire.hpp"

namespace attest::service {

namespace {

void send_nack(net::Socket& socket, const std::string& reason) {
  try {
    net::write_frame(socket, wire::encode_nack({reason}));
  } catch (const Error&) {
    // Peer already gone; the drop is the point.
  }
}

const cred::Credential* find_role(const std::vector<cred::Credential>& creds,
                                  cred::Role role) {
  for (const cred::Credential& c : creds) {
    if (c.role == role) return &c;
  }
  return nullptr;
}

// Full enrollment validation. Returns a NACK reason on refusal, and fills
// `golden` on success.
std::optional<std::string> validate_enrollment(
    const verifier::Bundle& bundle, BytesView nonce,
    const cred::TrustAnchorSet& anchors, const std::string& device_id,
    const std::vector<std::pair<std::string, std::string>>& device_info,
    verifier::GoldenTemplate& golden) {
  cred::CredentialStore store;
  try {
    for (const cred::Credential& c : bundle.credentials) store.add(c);
  } catch (const Error&) {
    return "chain";
  }
  const cred::Credential* root = find_role(bundle.credentials, cred::Role::root_ca);
  const cred::Credential* ek = find_role(bundle.credentials, cred::Role::ek);
  const cred::Credential* platform =
      find_role(bundle.credentials, cred::Role::platform);
  const cred::Credential* attrs =
      find_role(bundle.credentials, cred::Role::platform_attributes);
  const cred::Credential* ak = find_role(bundle.credentials, cred::Role::ak);
  if (!root || !ek || !platform || !attrs || !ak) {
    return "chain";
  }
  for (const cred::Credential* leaf : {ek, platform, attrs, ak}) {
    if (!cred::validate_chain(*leaf, store, anchors).ok()) {
      return "chain";
    }
  }
  if (cred::validate_binding(*platform, *attrs, *ek) != cred::BindingStatus::ok) {
    return "binding";
  }
  if (!cel::validate_log_for_source(bundle.firmware_log, cel::LogSource::firmware).ok() ||
      !cel::validate_log_for_source(bundle.ima_log, cel::LogSource::ima).ok()) {
    return "log";
  }
  // NV copies must carry the certificates the device presented.
  try {
    if (cred::fingerprint(cred::decode_credential(bundle.nv_ek_cert)) !=
            cred::fingerprint(*ek) ||
        cred::fingerprint(cred::decode_credential(bundle.nv_platform_cert)) !=
            cred::fingerprint(*platform)) {
      return "nv";
    }
  } catch (const Error&) {
    return "nv";
  }
  // The golden logs must be consistent with the quoted PCR state.
  try {
    verifier::ReplayResult replay = verifier::ReplayResult::zero();
    verifier::replay_into(replay, bundle.firmware_log);
    verifier::replay_into(replay, bundle.ima_log);
    verifier::QuoteChecks checks = verifier::verify_quote(
        bundle.quote, ak->public_key, nonce, replay);
    if (!checks.quote_signature.passed || !checks.nonce_match.passed ||
        !checks.pcr_match.passed) {
      return "quote";
    }
  } catch (const Error&) {
    return "quote";
  }

  golden.device_id = device_id;
  golden.firmware_rim.clear();
  for (const cel::Record& r : bundle.firmware_log.records) {
    golden.firmware_rim.push_back(
        {r.pcr_index, r.find_digest(cel::HashAlg::sha256)->value});
  }
  golden.ima_rim.clear();
  for (const cel::Record& r : bundle.ima_log.records) {
    golden.ima_rim.push_back(r.find_digest(cel::HashAlg::sha256)->value);
  }
  golden.cert_fingerprints = {
      {cred::Role::root_ca, cred::fingerprint(*root)},
      {cred::Role::ek, cred::fingerprint(*ek)},
      {cred::Role::platform, cred::fingerprint(*platform)},
      {cred::Role::platform_attributes, cred::fingerprint(*attrs)},
  };
  golden.ak_public = ak->public_key;
  golden.device_info = device_info;
  return std::nullopt;
}

}  // namespace

VerifierService::VerifierService(VerifierConfig config)
    : config_(std::move(config)),
      pending_(std::make_unique<spa::PendingTable>(
          config_.pending_capacity,
          std::chrono::duration<double>(config_.challenge_ttl_seconds))),
      store_(std::make_unique<store::EnrollmentStore>(config_.store_path)) {
  if (config_.anchors.empty()) {
    raise(Errc::bad_config, "no trust anchors installed");
  }
  if (config_.psk.empty() && config_.device_psks.empty()) {
    raise(Errc::bad_config, "no pre-shared keys configured");
  }
}

VerifierService::~VerifierService() { stop(); }

void VerifierService::start() {
  listener_ = net::Listener::bind(config_.host, config_.port);
  port_ = listener_.port();
  stopping_ = false;
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void VerifierService::stop() {
  if (!accept_thread_.joinable()) return;
  stopping_ = true;
  accept_thread_.join();
  listener_.close();
  // Give in-flight sessions a moment to drain.
  for (int i = 0; i < 100 && active_sessions_ > 0; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

void VerifierService::accept_loop() {
  while (!stopping_) {
    auto socket = listener_.accept(std::chrono::milliseconds(100));
    if (!socket) continue;
    ++active_sessions_;
    std::thread([this, s = std::move(*socket)]() mutable {
      try {
        handle_session(std::move(s));
      } catch (...) {
        // Session errors never take the service down.
      }
      --active_sessions_;
    }).detach();
  }
}

Bytes VerifierService::fresh_nonce() {
  Bytes nonce = crypto::random_bytes(32);
  std::lock_guard lock(nonce_mutex_);
  issued_nonces_.push_back(nonce);
  return nonce;
}

std::vector<Bytes> VerifierService::issued_nonces() const {
  std::lock_guard lock(nonce_mutex_);
  return issued_nonces_;
}

const Bytes* VerifierService::psk_for(const std::string& device_id) const {
  auto it = config_.device_psks.find(device_id);
  if (it != config_.device_psks.end()) return &it->second;
  if (!config_.psk.empty()) return &config_.psk;
  return nullptr;
}

void VerifierService::log_line(const std::string& line) {
  if (config_.session_log == nullptr) return;
  std::lock_guard lock(log_mutex_);
  *config_.session_log << line << std::endl;
}

void VerifierService::handle_session(net::Socket socket) {
  socket.set_recv_timeout(config_.read_deadline);
  std::string device_id = "?";
  try {
    wire::Frame first = net::read_frame(socket);

    if (first.type == wire::MsgType::hotp_auth) {
      // Replayed or out-of-order authentication: there is no outstanding
      // challenge for it, so it can only be rejected.
      wire::HotpAuth auth = wire::decode_hotp_auth(first);
      device_id = auth.device_id;
      const Bytes* key = psk_for(auth.device_id);
      spa::AuthResult result =
          key ? pending_->verify_auth(auth.device_id, auth.counter, auth.code, *key)
              : spa::AuthResult::reject(spa::RejectReason::no_challenge);
      send_nack(socket, "auth");
      log_line("session device=" + device_id + " result=nack:auth (" +
               std::string(spa::reject_reason_name(result.reason)) + ")");
      return;
    }

    wire::Hello hello = wire::decode_hello(first);
    device_id = hello.device_id;
    const Bytes* key = psk_for(device_id);
    if (key == nullptr) {
      send_nack(socket, "auth");
      log_line("session device=" + device_id + " result=nack:auth (no key)");
      return;
    }

    spa::Challenge challenge;
    try {
      challenge = pending_->issue_challenge(device_id);
    } catch (const Error& e) {
      if (e.code() == Errc::table_full) {
        send_nack(socket, "busy");
        log_line("session device=" + device_id + " result=nack:busy");
        return;
      }
      throw;
    }
    net::write_frame(socket, wire::encode_challenge({challenge.counter}));

    wire::HotpAuth auth = wire::decode_hotp_auth(net::read_frame(socket));
    spa::AuthResult result =
        pending_->verify_auth(auth.device_id, auth.counter, auth.code, *key);
    if (!result.accepted) {
      send_nack(socket, "auth");
      log_line("session device=" + device_id + " result=nack:auth (" +
               std::string(spa::reject_reason_name(result.reason)) + ")");
      return;
    }
    net::write_frame(socket, wire::encode_ack());

    wire::DeviceInfoMsg info = wire::decode_device_info(net::read_frame(socket));

    tpm::PcrSelection selection = tpm::PcrSelection::range(0, 10);

    if (!store_->find(device_id).has_value()) {
      // Enrollment: baseline quote + golden log ingestion.
      Bytes nonce = fresh_nonce();
      net::write_frame(socket, wire::encode_attest_request({nonce, selection}));
      wire::AttestResponse response =
          wire::decode_attest_response(net::read_frame(socket));
      verifier::GoldenTemplate golden;
      std::optional<std::string> refusal = validate_enrollment(
          response.bundle, nonce, config_.anchors, device_id, info.info, golden);
      if (refusal) {
        send_nack(socket, *refusal);
        log_line("session device=" + device_id + " result=nack:" + *refusal);
        return;
      }
      try {
        store_->put(golden);
      } catch (const Error&) {
        send_nack(socket, "storage");
        log_line("session device=" + device_id + " result=nack:storage");
        return;
      }
      net::write_frame(socket, wire::encode_ack());
      log_line("session device=" + device_id + " result=enrolled");
    }

    // Attestation against the enrolled golden template.
    auto golden = store_->find(device_id);
    if (!golden) {
      raise(Errc::device_unknown, device_id);
    }
    Bytes nonce = fresh_nonce();
    net::write_frame(socket, wire::encode_attest_request({nonce, selection}));
    wire::AttestResponse response =
        wire::decode_attest_response(net::read_frame(socket));
    verifier::AttestationVerdict verdict =
        verifier::attest(response.bundle, *golden, nonce, config_.anchors);
    net::write_frame(socket, wire::encode_verdict({verdict.to_json()}));
    log_line("session device=" + device_id + " result=verdict:" +
             (verdict.overall() ? "pass" : "fail"));
  } catch (const Error& e) {
    switch (e.code()) {
      case Errc::frame_too_large:
        send_nack(socket, "frame");
        break;
      case Errc::timeout:
      case Errc::io_error:
        break;  // peer is gone or silent; nothing to send
      default:
        send_nack(socket, "proto");
        break;
    }
    log_line("session device=" + device_id + " result=error:" +
             std::string(errc_name(e.code())));
  }
}

AgentOutcome run_prover_agent(provision::ProverContext& ctx,
                              const std::string& host, std::uint16_t port,
                              const AgentOptions& options) {
  net::Socket socket = net::Socket::connect(host, port);
  socket.set_recv_timeout(options.timeout);

  net::write_frame(socket, wire::encode_hello({ctx.device_id}));
  wire::Frame frame = net::read_frame(socket);
  if (frame.type == wire::MsgType::nack) {
    return {std::nullopt, wire::decode_nack(frame).reason};
  }
  wire::ChallengeMsg challenge = wire::decode_challenge(frame);
  net::write_frame(socket,
                   wire::encode_hotp_auth({ctx.device_id, challenge.counter,
                                           spa::hotp(ctx.psk, challenge.counter)}));
  frame = net::read_frame(socket);
  if (frame.type == wire::MsgType::nack) {
    return {std::nullopt, wire::decode_nack(frame).reason};
  }
  wire::decode_ack(frame);
  net::write_frame(socket, wire::encode_device_info({ctx.device_info}));

  while (true) {
    frame = net::read_frame(socket);
    switch (frame.type) {
      case wire::MsgType::ack:
        break;  // enrollment accepted; attestation follows
      case wire::MsgType::nack:
        return {std::nullopt, wire::decode_nack(frame).reason};
      case wire::MsgType::verdict: {
        AgentOutcome outcome;
        outcome.verdict = verifier::AttestationVerdict::from_json(
            wire::decode_verdict(frame).report_json);
        return outcome;
      }
      case wire::MsgType::attest_request: {
        wire::AttestRequest request = wire::decode_attest_request(frame);
        verifier::Bundle bundle;
        try {
          bundle.quote = ctx.tpm.quote(request.nonce, request.selection);
          bundle.nv_ek_cert = ctx.tpm.nv_read(tpm::kNvIndexEkCert);
          bundle.nv_platform_cert = ctx.tpm.nv_read(tpm::kNvIndexPlatformCert);
        } catch (const Error&) {
          send_nack(socket, "tpm");
          throw;
        }
        bundle.credentials = ctx.credentials.all();
        bundle.firmware_log = ctx.firmware_log;
        bundle.ima_log = ctx.ima_log;
        if (options.tamper) {
          auto [source, recnum] = *options.tamper;
          cel::Log& target = source == cel::LogSource::firmware
                                 ? bundle.firmware_log
                                 : bundle.ima_log;
          target = boot::tamper(target, recnum, boot::Mutation{});
        }
        net::write_frame(socket, wire::encode_attest_response({bundle}));
        break;
      }
      default:
        raise(Errc::malformed_message,
              std::string("unexpected ") + wire::msg_type_name(frame.type));
    }
  }
}

cred::TrustAnchorSet load_anchor_dir(const std::filesystem::path& dir) {
  cred::TrustAnchorSet anchors;
  if (std::filesystem::is_directory(dir)) {
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (!entry.is_regular_file() || entry.path().extension() != ".cred") {
        continue;
      }
      std::ifstream in(entry.path(), std::ios::binary);
      std::ostringstream buf;
      buf << in.rdbuf();
      std::string raw = buf.str();
      anchors.add(cred::decode_credential(
          BytesView(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size())));
    }
  }
  if (anchors.empty()) {
    raise(Errc::bad_config,
          "no .cred trust anchors found in " + dir.string());
  }
  return anchors;
}

Bytes load_psk_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(Errc::bad_config, "cannot read PSK file " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string raw = buf.str();
  return spa::load_psk(
      BytesView(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
}

}  // namespace attest::service
