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

#include "attest/spa.hpp"

#include <cstdio>

#include "attest/crypto.hpp"
#include "attest/error.hpp"

namespace attest::spa {

Bytes load_psk(BytesView raw) {
  if (raw.size() < kMinPskLen) {
    raise(Errc::bad_config, "pre-shared key must be at least 16 bytes");
  }
  return Bytes(raw.begin(), raw.end());
}

std::string hotp(BytesView key, std::uint64_t counter) {
  Bytes msg;
  put_u64be(msg, counter);
  Bytes mac = crypto::hmac_sha1(key, msg);
  std::size_t offset = mac[mac.size() - 1] & 0x0F;
  std::uint32_t bin = (static_cast<std::uint32_t>(mac[offset] & 0x7F) << 24) |
                      (static_cast<std::uint32_t>(mac[offset + 1]) << 16) |
                      (static_cast<std::uint32_t>(mac[offset + 2]) << 8) |
                      static_cast<std::uint32_t>(mac[offset + 3]);
  char out[kHotpDigits + 1];
  std::snprintf(out, sizeof(out), "%08u", bin % 100000000u);
  return std::string(out, kHotpDigits);
}

const char* reject_reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::no_challenge: return "no_challenge";
    case RejectReason::expired: return "expired";
    case RejectReason::counter_mismatch: return "counter_mismatch";
    case RejectReason::bad_code: return "bad_code";
  }
  return "unknown";
}

PendingTable::PendingTable(std::size_t capacity,
                           std::chrono::duration<double> ttl, Clock clock)
    : capacity_(capacity),
      ttl_(ttl),
      clock_(clock ? std::move(clock)
                   : [] { return std::chrono::steady_clock::now(); }) {
  if (capacity_ == 0) {
    raise(Errc::bad_config, "pending table capacity must be positive");
  }
}

bool PendingTable::expired(const Challenge& c,
                           std::chrono::steady_clock::time_point now) const {
  return now - c.issued_at > c.ttl;
}

Challenge PendingTable::issue_challenge(const std::string& device_id) {
  std::lock_guard lock(mutex_);
  auto now = clock_();
  for (auto it = entries_.begin(); it != entries_.end();) {
    if (expired(it->second, now)) {
      it = entries_.erase(it);
    } else {
      ++it;
    }
  }
  auto it = entries_.find(device_id);
  if (it == entries_.end() && entries_.size() >= capacity_) {
    raise(Errc::table_full, "pending table at capacity " +
                                std::to_string(capacity_));
  }
  Challenge c{device_id, ++next_counter_, now, ttl_};
  entries_[device_id] = c;
  return c;
}

AuthResult PendingTable::verify_auth(const std::string& device_id,
                                     std::uint64_t counter,
                                     std::string_view code, BytesView key) {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(device_id);
  if (it == entries_.end()) {
    return AuthResult::reject(RejectReason::no_challenge);
  }
  if (expired(it->second, clock_())) {
    entries_.erase(it);
    return AuthResult::reject(RejectReason::expired);
  }
  if (it->second.counter != counter) {
    return AuthResult::reject(RejectReason::counter_mismatch);
  }
  if (!crypto::constant_time_equal(std::string_view(hotp(key, counter)), code)) {
    return AuthResult::reject(RejectReason::bad_code);
  }
  entries_.erase(it);
  return AuthResult::accept();
}

std::size_t PendingTable::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

}  // namespace attest::spa
