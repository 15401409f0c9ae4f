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

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "attest/net.hpp"
#include "attest/provision.hpp"
#include "attest/spa.hpp"
#include "attest/store.hpp"
#include "attest/verifier.hpp"

namespace attest::service {

// Session flow (one framed TCP stream, big-endian integers):
//
//   prover                         verifier
//   HELLO{device_id}          ->
//                             <-   CHALLENGE{counter}
//   HOTP_AUTH{id,ctr,code}    ->
//                             <-   ACK                 (or NACK{auth}, drop)
//   DEVICE_INFO{...}          ->
//   [unknown device: enrollment]
//                             <-   ATTEST_REQUEST{nonce1, selection}
//   ATTEST_RESPONSE{bundle}   ->
//                             <-   ACK                 (or NACK{...}, drop)
//   [attestation, always]
//                             <-   ATTEST_REQUEST{nonce2, selection}
//   ATTEST_RESPONSE{bundle}   ->
//                             <-   VERDICT{report}
//
// Unauthenticated peers can only reach HELLO/HOTP_AUTH handling, backed by
// the bounded PendingTable; every read runs under a deadline.

struct VerifierConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks an ephemeral port
  cred::TrustAnchorSet anchors;
  Bytes psk;  // default pre-shared key for all devices
  std::map<std::string, Bytes> device_psks;  // per-device overrides
  std::filesystem::path store_path;
  double challenge_ttl_seconds = 10.0;
  std::size_t pending_capacity = 1024;
  std::chrono::milliseconds read_deadline{10000};
  std::ostream* session_log = nullptr;
};

class VerifierService {
 public:
  explicit VerifierService(VerifierConfig config);
  ~VerifierService();

  void start();
  void stop();
  std::uint16_t port() const { return port_; }

  std::size_t pending_size() const { return pending_->size(); }
  std::size_t enrolled_count() const { return store_->size(); }
  const store::EnrollmentStore& enrollment_store() const { return *store_; }
  // Every attestation nonce handed out so far, for uniqueness checks.
  std::vector<Bytes> issued_nonces() const;

 private:
  void accept_loop();
  void handle_session(net::Socket socket);
  Bytes fresh_nonce();
  const Bytes* psk_for(const std::string& device_id) const;
  void log_line(const std::string& line);

  VerifierConfig config_;
  std::unique_ptr<spa::PendingTable> pending_;
  std::unique_ptr<store::EnrollmentStore> store_;
  net::Listener listener_;
  std::uint16_t port_ = 0;
  std::thread accept_thread_;
  std::atomic<bool> stopping_{false};
  std::atomic<int> active_sessions_{0};
  mutable std::mutex nonce_mutex_;
  std::vector<Bytes> issued_nonces_;
  mutable std::mutex log_mutex_;
};

/// What a prover run produced: a verdict, a verifier refusal, or neither
/// (transport fault details surface as thrown Errors).
struct AgentOutcome {
  std::optional<verifier::AttestationVerdict> verdict;
  std::optional<std::string> nack_reason;

  bool completed() const { return verdict.has_value(); }
};

struct AgentOptions {
  std::chrono::milliseconds timeout{10000};
  // Mutates the named record of the chosen log in every response sent.
  std::optional<std::pair<cel::LogSource, std::uint64_t>> tamper;
};

// Executes the provisioning + attestation flow against a verifier. Local TPM
// faults (missing AK, absent NV data) are reported to the peer as NACK{tpm}
// and rethrown.
AgentOutcome run_prover_agent(provision::ProverContext& ctx,
                              const std::string& host, std::uint16_t port,
                              const AgentOptions& options = {});

// Loads every .cred file in dir as a trust anchor; all must be root
// credentials. Throws Errc::bad_config when the directory yields none.
cred::TrustAnchorSet load_anchor_dir(const std::filesystem::path& dir);

Bytes load_psk_file(const std::filesystem::path& path);

}  // namespace attest::service
