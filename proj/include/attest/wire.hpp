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
#include "attest/tpm.hpp"
#include "attest/verifier.hpp"

namespace attest::wire {

// Wire frame: [length 4B BE][msg_type 1B][payload], length = 1 + payload
// size, capped at 2^20 so no peer can force unbounded buffering. Payloads
// are TLV with message-local tags; all integers big-endian.

enum class MsgType : std::uint8_t {
  hello = 0x01,
  challenge = 0x02,
  hotp_auth = 0x03,
  ack = 0x04,
  nack = 0x05,
  device_info = 0x06,
  attest_request = 0x07,
  attest_response = 0x08,
  verdict = 0x09,
};

const char* msg_type_name(MsgType t);

inline constexpr std::size_t kMaxFramePayload = std::size_t{1} << 20;

struct Frame {
  MsgType type;
  Bytes payload;
};

Bytes encode_frame(const Frame& f);
// Decodes one frame from the head of b; returns the frame and bytes
// consumed. Errors: truncated, frame_too_large, malformed_message.
std::pair<Frame, std::size_t> decode_frame(BytesView b);

struct Hello {
  std::string device_id;
};

struct ChallengeMsg {
  std::uint64_t counter = 0;
};

struct HotpAuth {
  std::string device_id;
  std::uint64_t counter = 0;
  std::string code;
};

struct Nack {
  std::string reason;
};

struct DeviceInfoMsg {
  std::vector<std::pair<std::string, std::string>> info;
};

struct AttestRequest {
  Bytes nonce;  // 32 bytes from the verifier
  tpm::PcrSelection selection;
};

struct AttestResponse {
  verifier::Bundle bundle;
};

struct VerdictMsg {
  std::string report_json;
};

Frame encode_hello(const Hello& m);
Frame encode_challenge(const ChallengeMsg& m);
Frame encode_hotp_auth(const HotpAuth& m);
Frame encode_ack();
Frame encode_nack(const Nack& m);
Frame encode_device_info(const DeviceInfoMsg& m);
Frame encode_attest_request(const AttestRequest& m);
Frame encode_attest_response(const AttestResponse& m);
Frame encode_verdict(const VerdictMsg& m);

// Decoders throw Errc::malformed_message on the wrong frame type or a
// payload that does not parse.
Hello decode_hello(const Frame& f);
ChallengeMsg decode_challenge(const Frame& f);
HotpAuth decode_hotp_auth(const Frame& f);
void decode_ack(const Frame& f);
Nack decode_nack(const Frame& f);
DeviceInfoMsg decode_device_info(const Frame& f);
AttestRequest decode_attest_request(const Frame& f);
AttestResponse decode_attest_response(const Frame& f);
VerdictMsg decode_verdict(const Frame& f);

}  // namespace attest::wire
