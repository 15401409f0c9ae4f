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

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "attest/bytes.hpp"

namespace attest::cel {

// Canonical event log: sequence-numbered TLV records for firmware and IMA
// events. Record layout, bit-exact and in this field order:
//
//   [0x00][len=8 BE][recnum 8B BE]
//   [0x01][len=4 BE][pcr 4B BE]
//   [0x02][len BE]  [ ([alg 1B][len BE][digest bytes])+ ]
//   [0x03][len BE]  [content_type 1B][payload]
//
// All lengths are 4-byte big-endian. A log is the concatenation of its
// records with no header; recnums run 0,1,2,... with no gaps.

inline constexpr std::uint32_t kPcrCount = 24;

enum class HashAlg : std::uint8_t {
  sha1 = 0x04,
  sha256 = 0x0B,
};

constexpr std::size_t digest_length(HashAlg alg) {
  return alg == HashAlg::sha1 ? 20 : 32;
}

std::optional<HashAlg> hash_alg_from_id(std::uint8_t id);

struct Digest {
  HashAlg alg;
  Bytes value;  // exactly digest_length(alg) bytes

  bool operator==(const Digest&) const = default;
};

enum class ContentType : std::uint8_t {
  pc_client_info = 0x01,
  firmware = 0x02,
  ima = 0x03,
};

inline constexpr std::size_t kMaxContentPayload = std::size_t{1} << 24;

struct Content {
  ContentType type;
  Bytes payload;

  bool operator==(const Content&) const = default;
};

struct Record {
  std::uint64_t recnum = 0;
  std::uint32_t pcr_index = 0;
  std::vector<Digest> digests;  // nonempty, at most one per algorithm
  Content content{ContentType::firmware, {}};

  const Digest* find_digest(HashAlg alg) const;

  bool operator==(const Record&) const = default;
};

struct Log {
  std::vector<Record> records;

  bool operator==(const Log&) const = default;
};

// Throws Errc::invalid_record when an invariant fails.
void validate_record(const Record& r);

Bytes encode_record(const Record& r);
// Returns the decoded record and the number of bytes consumed.
// Errors: truncated, unknown_tag, unknown_algorithm, digest_length_mismatch,
// invalid_record.
std::pair<Record, std::size_t> decode_record(BytesView b);

Bytes encode_log(const Log& log);
// Additionally rejects recnum gaps/disorder with Errc::sequence_violation.
Log decode_log(BytesView b);

enum class LogSource { firmware, ima };

struct SourceFinding {
  std::uint64_t recnum;
  std::uint32_t pcr_index;
};

struct SourceReport {
  std::vector<SourceFinding> offending;
  bool ok() const { return offending.empty(); }
};

// Firmware logs must keep every pcr_index in [0,9]; IMA logs must keep
// every pcr_index == 10.
SourceReport validate_log_for_source(const Log& log, LogSource source);

// Line-oriented hex-field debug form, lossless against the binary form:
//   rec <recnum> pcr <pcr> digests <alg>:<hex>[,<alg>:<hex>]* content <type> <hex|->
// '#' starts a comment; '-' stands for an empty payload.
std::string to_debug_text(const Log& log);
Log from_debug_text(std::string_view text);

}  // namespace attest::cel
