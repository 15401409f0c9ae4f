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

#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <string_view>

#include "attest/bytes.hpp"

namespace attest::spa {

inline constexpr std::size_t kMinPskLen = 16;
inline constexpr int kHotpDigits = 8;

// Pre-shared keys are loaded out of band on both sides; shorter keys are a
// configuration fault.
Bytes load_psk(BytesView raw);

/// HMAC-SHA1 over the 8-byte big-endian counter, dynamic truncation, modulo
/// 10^8, zero-padded to 8 digits.
std::string hotp(BytesView key, std::uint64_t counter);

struct Challenge {
  std::string device_id;
  std::uint64_t counter = 0;
  std::chrono::steady_clock::time_point issued_at;
  std::chrono::duration<double> ttl{0};
};

enum class RejectReason { no_challenge, expired, counter_mismatch, bad_code };

const char* reject_reason_name(RejectReason r);

struct AuthResult {
  bool accepted = false;
  RejectReason reason = RejectReason::no_challenge;

  static AuthResult accept() { return {true, RejectReason::no_challenge}; }
  static AuthResult reject(RejectReason r) { return {false, r}; }
};

/// Bounded table of outstanding provisioning challenges: one per device_id,
/// never more than `capacity` total, so memory attributable to
/// unauthenticated peers stays O(capacity). Counters are drawn from one
/// monotonic source, so they strictly increase per device and a counter is
/// usable at most once. issue/verify/evict transitions are atomic.
class PendingTable {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  PendingTable(std::size_t capacity, std::chrono::duration<double> ttl,
               Clock clock = nullptr);

  // Replaces any outstanding challenge for the device. When the table is
  // full and nothing has expired, throws Errc::table_full (a refusal, not a
  // fault) without allocating.
  Challenge issue_challenge(const std::string& device_id);

  // Accepts iff an unexpired challenge matches (device_id, counter) and the
  // code equals hotp(key, counter); comparison is constant-time. Accepting
  // consumes the challenge.
  AuthResult verify_auth(const std::string& device_id, std::uint64_t counter,
                         std::string_view code, BytesView key);

  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }

 private:
  bool expired(const Challenge& c,
               std::chrono::steady_clock::time_point now) const;

  mutable std::mutex mutex_;
  std::size_t capacity_;
  std::chrono::duration<double> ttl_;
  Clock clock_;
  std::map<std::string, Challenge> entries_;
  std::uint64_t next_counter_ = 0;
};

}  // namespace attest::spa
