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

#include "attest/wire.hpp"

#include "attest/cel.hpp"
#include "attest/credential.hpp"
#include "attest/error.hpp"
#include "attest/tlv.hpp"

namespace attest::wire {

namespace {

// Message-local field tags.
constexpr std::uint8_t kTagDeviceId = 0x01;
constexpr std::uint8_t kTagCounter = 0x01;
constexpr std::uint8_t kTagAuthDeviceId = 0x01;
constexpr std::uint8_t kTagAuthCounter = 0x02;
constexpr std::uint8_t kTagAuthCode = 0x03;
constexpr std::uint8_t kTagReason = 0x01;
constexpr std::uint8_t kTagInfoEntry = 0x01;
constexpr std::uint8_t kTagNonce = 0x01;
constexpr std::uint8_t kTagSelection = 0x02;
constexpr std::uint8_t kTagCredential = 0x01;
constexpr std::uint8_t kTagNvEk = 0x02;
constexpr std::uint8_t kTagNvPlatform = 0x03;
constexpr std::uint8_t kTagFirmwareLog = 0x04;
constexpr std::uint8_t kTagImaLog = 0x05;
constexpr std::uint8_t kTagQuote = 0x06;
constexpr std::uint8_t kTagReport = 0x01;

inline constexpr std::size_t kMaxDeviceId = 128;

void require_type(const Frame& f, MsgType want) {
  if (f.type != want) {
    raise(Errc::malformed_message,
          std::string("expected ") + msg_type_name(want) + ", got " +
              msg_type_name(f.type));
  }
}

std::string decode_device_id(BytesView value) {
  if (value.empty() || value.size() > kMaxDeviceId) {
    raise(Errc::malformed_message, "device id must be 1..128 bytes");
  }
  return to_string(value);
}

}  // namespace

const char* msg_type_name(MsgType t) {
  switch (t) {
    case MsgType::hello: return "HELLO";
    case MsgType::challenge: return "CHALLENGE";
    case MsgType::hotp_auth: return "HOTP_AUTH";
    case MsgType::ack: return "ACK";
    case MsgType::nack: return "NACK";
    case MsgType::device_info: return "DEVICE_INFO";
    case MsgType::attest_request: return "ATTEST_REQUEST";
    case MsgType::attest_response: return "ATTEST_RESPONSE";
    case MsgType::verdict: return "VERDICT";
  }
  return "UNKNOWN";
}

Bytes encode_frame(const Frame& f) {
  if (f.payload.size() > kMaxFramePayload) {
    raise(Errc::frame_too_large, "payload of " + std::to_string(f.payload.size()) +
                                     " bytes exceeds 2^20");
  }
  Bytes out;
  put_u32be(out, static_cast<std::uint32_t>(1 + f.payload.size()));
  out.push_back(static_cast<std::uint8_t>(f.type));
  append(out, f.payload);
  return out;
}

std::pair<Frame, std::size_t> decode_frame(BytesView b) {
  if (b.size() < 4) {
    raise(Errc::truncated, "frame length header");
  }
  std::uint32_t length = read_u32be(b.data());
  if (length == 0) {
    raise(Errc::malformed_message, "frame length zero");
  }
  if (length > kMaxFramePayload + 1) {
    raise(Errc::frame_too_large,
          "frame length " + std::to_string(length) + " exceeds bound");
  }
  if (b.size() - 4 < length) {
    raise(Errc::truncated, "frame body of " + std::to_string(length) + " bytes");
  }
  std::uint8_t type = b[4];
  if (type < 0x01 || type > 0x09) {
    raise(Errc::malformed_message, "unknown message type " + std::to_string(type));
  }
  Frame f{static_cast<MsgType>(type),
          Bytes(b.begin() + 5, b.begin() + 4 + length)};
  return {std::move(f), 4 + static_cast<std::size_t>(length)};
}

Frame encode_hello(const Hello& m) {
  tlv::Writer w;
  w.field(kTagDeviceId, to_bytes(m.device_id));
  return Frame{MsgType::hello, w.take()};
}

Hello decode_hello(const Frame& f) {
  require_type(f, MsgType::hello);
  tlv::Reader rd(f.payload);
  return Hello{decode_device_id(rd.expect(kTagDeviceId).value)};
}

Frame encode_challenge(const ChallengeMsg& m) {
  tlv::Writer w;
  w.field_u64(kTagCounter, m.counter);
  return Frame{MsgType::challenge, w.take()};
}

ChallengeMsg decode_challenge(const Frame& f) {
  require_type(f, MsgType::challenge);
  tlv::Reader rd(f.payload);
  return ChallengeMsg{rd.expect_u64(kTagCounter)};
}

Frame encode_hotp_auth(const HotpAuth& m) {
  tlv::Writer w;
  w.field(kTagAuthDeviceId, to_bytes(m.device_id));
  w.field_u64(kTagAuthCounter, m.counter);
  w.field(kTagAuthCode, to_bytes(m.code));
  return Frame{MsgType::hotp_auth, w.take()};
}

HotpAuth decode_hotp_auth(const Frame& f) {
  require_type(f, MsgType::hotp_auth);
  tlv::Reader rd(f.payload);
  HotpAuth m;
  m.device_id = decode_device_id(rd.expect(kTagAuthDeviceId).value);
  m.counter = rd.expect_u64(kTagAuthCounter);
  tlv::Field code = rd.expect(kTagAuthCode);
  if (code.value.size() != 8) {
    raise(Errc::malformed_message, "HOTP code must be 8 digits");
  }
  m.code = to_string(code.value);
  return m;
}

Frame encode_ack() { return Frame{MsgType::ack, {}}; }

void decode_ack(const Frame& f) { require_type(f, MsgType::ack); }

Frame encode_nack(const Nack& m) {
  tlv::Writer w;
  w.field(kTagReason, to_bytes(m.reason));
  return Frame{MsgType::nack, w.take()};
}

Nack decode_nack(const Frame& f) {
  require_type(f, MsgType::nack);
  tlv::Reader rd(f.payload);
  return Nack{to_string(rd.expect(kTagReason).value)};
}

Frame encode_device_info(const DeviceInfoMsg& m) {
  tlv::Writer w;
  for (const auto& [key, value] : m.info) {
    if (key.find('\0') != std::string::npos) {
      raise(Errc::invalid_argument, "info key contains NUL");
    }
    Bytes entry = to_bytes(key);
    entry.push_back(0x00);
    append(entry, to_bytes(value));
    w.field(kTagInfoEntry, entry);
  }
  return Frame{MsgType::device_info, w.take()};
}

DeviceInfoMsg decode_device_info(const Frame& f) {
  require_type(f, MsgType::device_info);
  DeviceInfoMsg m;
  tlv::Reader rd(f.payload);
  while (!rd.done()) {
    tlv::Field e = rd.expect(kTagInfoEntry);
    auto nul = std::find(e.value.begin(), e.value.end(), std::uint8_t{0});
    if (nul == e.value.end()) {
      raise(Errc::malformed_message, "info entry lacks key separator");
    }
    m.info.emplace_back(std::string(e.value.begin(), nul),
                        std::string(nul + 1, e.value.end()));
  }
  return m;
}

Frame encode_attest_request(const AttestRequest& m) {
  tlv::Writer w;
  w.field(kTagNonce, m.nonce);
  w.field(kTagSelection, m.selection.bits());
  return Frame{MsgType::attest_request, w.take()};
}

AttestRequest decode_attest_request(const Frame& f) {
  require_type(f, MsgType::attest_request);
  tlv::Reader rd(f.payload);
  AttestRequest m;
  tlv::Field nonce = rd.expect(kTagNonce);
  if (nonce.value.size() != 32) {
    raise(Errc::malformed_message, "attestation nonce must be 32 bytes");
  }
  m.nonce = Bytes(nonce.value.begin(), nonce.value.end());
  m.selection = tpm::PcrSelection::from_bytes(rd.expect(kTagSelection).value);
  return m;
}

Frame encode_attest_response(const AttestResponse& m) {
  tlv::Writer w;
  for (const cred::Credential& c : m.bundle.credentials) {
    w.field(kTagCredential, cred::encode_credential(c));
  }
  w.field(kTagNvEk, m.bundle.nv_ek_cert);
  w.field(kTagNvPlatform, m.bundle.nv_platform_cert);
  w.field(kTagFirmwareLog, cel::encode_log(m.bundle.firmware_log));
  w.field(kTagImaLog, cel::encode_log(m.bundle.ima_log));
  w.field(kTagQuote, tpm::encode_quote(m.bundle.quote));
  return Frame{MsgType::attest_response, w.take()};
}

AttestResponse decode_attest_response(const Frame& f) {
  require_type(f, MsgType::attest_response);
  AttestResponse m;
  tlv::Reader rd(f.payload);
  tlv::Field field = rd.next();
  while (field.tag == kTagCredential) {
    m.bundle.credentials.push_back(cred::decode_credential(field.value));
    field = rd.next();
  }
  if (field.tag != kTagNvEk) {
    raise(Errc::malformed_message, "attest response lacks NV EK copy");
  }
  m.bundle.nv_ek_cert = Bytes(field.value.begin(), field.value.end());
  field = rd.expect(kTagNvPlatform);
  m.bundle.nv_platform_cert = Bytes(field.value.begin(), field.value.end());
  m.bundle.firmware_log = cel::decode_log(rd.expect(kTagFirmwareLog).value);
  m.bundle.ima_log = cel::decode_log(rd.expect(kTagImaLog).value);
  m.bundle.quote = tpm::decode_quote(rd.expect(kTagQuote).value);
  return m;
}

Frame encode_verdict(const VerdictMsg& m) {
  tlv::Writer w;
  w.field(kTagReport, to_bytes(m.report_json));
  return Frame{MsgType::verdict, w.take()};
}

VerdictMsg decode_verdict(const Frame& f) {
  require_type(f, MsgType::verdict);
  tlv::Reader rd(f.payload);
  return VerdictMsg{to_string(rd.expect(kTagReport).value)};
}

}  // namespace attest::wire
