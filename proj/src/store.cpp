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

#include "attest/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <fstream>
#include <sstream>

#include "attest/error.hpp"
#include "attest/tlv.hpp"

namespace attest::store {

namespace {

constexpr std::uint8_t kTagDeviceId = 0x40;
constexpr std::uint8_t kTagFirmwareRimEntry = 0x41;
constexpr std::uint8_t kTagImaRimEntry = 0x42;
constexpr std::uint8_t kTagCertFingerprint = 0x43;
constexpr std::uint8_t kTagAkPublic = 0x44;
constexpr std::uint8_t kTagInfoEntry = 0x45;

constexpr std::uint8_t kTagTemplateFrame = 0x60;

}  // namespace

Bytes encode_template(const verifier::GoldenTemplate& t) {
  tlv::Writer w;
  w.field(kTagDeviceId, to_bytes(t.device_id));
  for (const verifier::RimEntry& e : t.firmware_rim) {
    Bytes entry;
    put_u32be(entry, e.pcr_index);
    append(entry, e.digest);
    w.field(kTagFirmwareRimEntry, entry);
  }
  for (const Bytes& d : t.ima_rim) {
    w.field(kTagImaRimEntry, d);
  }
  for (const auto& [role, fp] : t.cert_fingerprints) {
    Bytes entry;
    entry.push_back(static_cast<std::uint8_t>(role));
    append(entry, cred::fingerprint_view(fp));
    w.field(kTagCertFingerprint, entry);
  }
  w.field(kTagAkPublic, t.ak_public);
  for (const auto& [key, value] : t.device_info) {
    Bytes entry = to_bytes(key);
    entry.push_back(0x00);
    append(entry, to_bytes(value));
    w.field(kTagInfoEntry, entry);
  }
  return w.take();
}

verifier::GoldenTemplate decode_template(BytesView b) {
  verifier::GoldenTemplate t;
  tlv::Reader rd(b);
  t.device_id = to_string(rd.expect(kTagDeviceId).value);
  while (!rd.done()) {
    tlv::Field f = rd.next();
    switch (f.tag) {
      case kTagFirmwareRimEntry: {
        if (f.value.size() != 4 + 32) {
          raise(Errc::malformed_message, "firmware RIM entry must be 36 bytes");
        }
        verifier::RimEntry e;
        e.pcr_index = read_u32be(f.value.data());
        e.digest = Bytes(f.value.begin() + 4, f.value.end());
        t.firmware_rim.push_back(std::move(e));
        break;
      }
      case kTagImaRimEntry:
        if (f.value.size() != 32) {
          raise(Errc::malformed_message, "IMA RIM entry must be 32 bytes");
        }
        t.ima_rim.emplace_back(f.value.begin(), f.value.end());
        break;
      case kTagCertFingerprint: {
        if (f.value.size() != 33 ||
            f.value[0] > static_cast<std::uint8_t>(cred::Role::ak)) {
          raise(Errc::malformed_message, "certificate fingerprint entry malformed");
        }
        cred::Fingerprint fp;
        std::copy(f.value.begin() + 1, f.value.end(), fp.begin());
        t.cert_fingerprints.emplace_back(static_cast<cred::Role>(f.value[0]), fp);
        break;
      }
      case kTagAkPublic:
        t.ak_public = Bytes(f.value.begin(), f.value.end());
        break;
      case kTagInfoEntry: {
        auto nul = std::find(f.value.begin(), f.value.end(), std::uint8_t{0});
        if (nul == f.value.end()) {
          raise(Errc::malformed_message, "info entry lacks key separator");
        }
        t.device_info.emplace_back(std::string(f.value.begin(), nul),
                                   std::string(nul + 1, f.value.end()));
        break;
      }
      default:
        raise(Errc::unknown_tag, "template field " + std::to_string(f.tag));
    }
  }
  if (t.ak_public.empty()) {
    raise(Errc::malformed_message, "template lacks AK public key");
  }
  return t;
}

EnrollmentStore::EnrollmentStore(std::filesystem::path path)
    : path_(std::move(path)) {
  load();
}

void EnrollmentStore::load() {
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;  // nothing enrolled yet
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string raw = buf.str();
  BytesView view(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size());
  tlv::Reader rd(view);
  while (!rd.done()) {
    verifier::GoldenTemplate t;
    try {
      t = decode_template(rd.expect(kTagTemplateFrame).value);
    } catch (const Error&) {
      // Truncated or torn tail record; everything before it is committed.
      break;
    }
    records_[t.device_id] = std::move(t);
  }
}

void EnrollmentStore::commit_locked() {
  std::filesystem::path tmp = path_;
  tmp += ".tmp";
  tlv::Writer w;
  for (const auto& [id, t] : records_) {
    w.field(kTagTemplateFrame, encode_template(t));
  }
  Bytes data = w.take();
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) {
    raise(Errc::io_error, "cannot open " + tmp.string());
  }
  std::size_t written = 0;
  while (written < data.size()) {
    ssize_t n = ::write(fd, data.data() + written, data.size() - written);
    if (n < 0) {
      ::close(fd);
      raise(Errc::io_error, "write to " + tmp.string() + " failed");
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    raise(Errc::io_error, "fsync of " + tmp.string() + " failed");
  }
  ::close(fd);
  std::error_code ec;
  std::filesystem::rename(tmp, path_, ec);
  if (ec) {
    raise(Errc::io_error, "rename to " + path_.string() + ": " + ec.message());
  }
}

std::optional<verifier::GoldenTemplate> EnrollmentStore::find(
    const std::string& device_id) const {
  std::lock_guard lock(mutex_);
  auto it = records_.find(device_id);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

void EnrollmentStore::put(const verifier::GoldenTemplate& t) {
  std::lock_guard lock(mutex_);
  auto backup = records_;
  records_[t.device_id] = t;
  try {
    commit_locked();
  } catch (...) {
    records_ = std::move(backup);
    throw;
  }
}

std::size_t EnrollmentStore::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

std::vector<std::string> EnrollmentStore::device_ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> ids;
  ids.reserve(records_.size());
  for (const auto& [id, t] : records_) ids.push_back(id);
  return ids;
}

}  // namespace attest::store
