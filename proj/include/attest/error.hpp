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

#include <stdexcept>
#include <string>

namespace attest {

enum class Errc {
  // codec
  truncated,
  unknown_tag,
  unknown_algorithm,
  digest_length_mismatch,
  invalid_record,
  sequence_violation,
  // tpm
  bank_mismatch,
  index_out_of_range,
  no_attestation_key,
  nv_index_absent,
  nv_too_large,
  ek_missing,
  // measured boot
  invalid_image,
  record_absent,
  // credentials
  role_violation,
  // provisioning auth
  table_full,
  // verifier
  missing_sha256_digest,
  device_unknown,
  // wire / service
  frame_too_large,
  malformed_message,
  timeout,
  io_error,
  bad_config,
  // generic precondition violation
  invalid_argument,
};

constexpr const char* errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::truncated: return "truncated";
    case Errc::unknown_tag: return "unknown_tag";
    case Errc::unknown_algorithm: return "unknown_algorithm";
    case Errc::digest_length_mismatch: return "digest_length_mismatch";
    case Errc::invalid_record: return "invalid_record";
    case Errc::sequence_violation: return "sequence_violation";
    case Errc::bank_mismatch: return "bank_mismatch";
    case Errc::index_out_of_range: return "index_out_of_range";
    case Errc::no_attestation_key: return "no_attestation_key";
    case Errc::nv_index_absent: return "nv_index_absent";
    case Errc::nv_too_large: return "nv_too_large";
    case Errc::ek_missing: return "ek_missing";
    case Errc::invalid_image: return "invalid_image";
    case Errc::record_absent: return "record_absent";
    case Errc::role_violation: return "role_violation";
    case Errc::table_full: return "table_full";
    case Errc::missing_sha256_digest: return "missing_sha256_digest";
    case Errc::device_unknown: return "device_unknown";
    case Errc::frame_too_large: return "frame_too_large";
    case Errc::malformed_message: return "malformed_message";
    case Errc::timeout: return "timeout";
    case Errc::io_error: return "io_error";
    case Errc::bad_config: return "bad_config";
    case Errc::invalid_argument: return "invalid_argument";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace attest
