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

#include "attest/cel.hpp"

#include <sstream>
#include <string>

#include "attest/error.hpp"
#include "attest/tlv.hpp"

namespace attest::cel {

namespace {

constexpr std::uint8_t kTagRecnum = 0x00;
constexpr std::uint8_t kTagPcr = 0x01;
constexpr std::uint8_t kTagDigests = 0x02;
constexpr std::uint8_t kTagContent = 0x03;

bool valid_content_type(std::uint8_t t) { return t >= 0x01 && t <= 0x03; }

}  // namespace

std::optional<HashAlg> hash_alg_from_id(std::uint8_t id) {
  switch (id) {
    case 0x04: return HashAlg::sha1;
    case 0x0B: return HashAlg::sha256;
    default: return std::nullopt;
  }
}

const Digest* Record::find_digest(HashAlg alg) const {
  for (const Digest& d : digests) {
    if (d.alg == alg) return &d;
  }
  return nullptr;
}

void validate_record(const Record& r) {
  if (r.pcr_index >= kPcrCount) {
    raise(Errc::invalid_record,
          "pcr_index " + std::to_string(r.pcr_index) + " out of [0,23]");
  }
  if (r.digests.empty()) {
    raise(Errc::invalid_record, "record carries no digests");
  }
  for (std::size_t i = 0; i < r.digests.size(); ++i) {
    const Digest& d = r.digests[i];
    if (d.value.size() != digest_length(d.alg)) {
      raise(Errc::invalid_record, "digest length does not match algorithm");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (r.digests[j].alg == d.alg) {
        raise(Errc::invalid_record, "duplicate digest algorithm");
      }
    }
  }
  if (!valid_content_type(static_cast<std::uint8_t>(r.content.type))) {
    raise(Errc::invalid_record, "unknown content type");
  }
  if (r.content.payload.size() > kMaxContentPayload) {
    raise(Errc::invalid_record, "content payload exceeds 2^24 bytes");
  }
}

Bytes encode_record(const Record& r) {
  validate_record(r);
  tlv::Writer w;
  w.field_u64(kTagRecnum, r.recnum);
  w.field_u32(kTagPcr, r.pcr_index);
  tlv::Writer digests;
  for (const Digest& d : r.digests) {
    digests.field(static_cast<std::uint8_t>(d.alg), d.value);
  }
  w.field(kTagDigests, digests.bytes());
  Bytes content;
  content.push_back(static_cast<std::uint8_t>(r.content.type));
  append(content, r.content.payload);
  w.field(kTagContent, content);
  return w.take();
}

std::pair<Record, std::size_t> decode_record(BytesView b) {
  tlv::Reader rd(b);
  Record r;
  r.recnum = rd.expect_u64(kTagRecnum);
  r.pcr_index = rd.expect_u32(kTagPcr);
  if (r.pcr_index >= kPcrCount) {
    raise(Errc::invalid_record,
          "pcr_index " + std::to_string(r.pcr_index) + " out of [0,23]");
  }

  tlv::Field digests = rd.expect(kTagDigests);
  tlv::Reader dr(digests.value);
  while (!dr.done()) {
    tlv::Field f = dr.next();
    auto alg = hash_alg_from_id(f.tag);
    if (!alg) {
      raise(Errc::unknown_algorithm,
            "digest algorithm id " + std::to_string(f.tag));
    }
    if (f.value.size() != digest_length(*alg)) {
      raise(Errc::digest_length_mismatch,
            "algorithm " + std::to_string(f.tag) + " requires " +
                std::to_string(digest_length(*alg)) + " bytes, found " +
                std::to_string(f.value.size()));
    }
    if (r.find_digest(*alg) != nullptr) {
      raise(Errc::invalid_record, "duplicate digest algorithm");
    }
    r.digests.push_back(Digest{*alg, Bytes(f.value.begin(), f.value.end())});
  }
  if (r.digests.empty()) {
    raise(Errc::invalid_record, "record carries no digests");
  }

  tlv::Field content = rd.expect(kTagContent);
  if (content.value.empty()) {
    raise(Errc::truncated, "content field lacks its type byte");
  }
  if (!valid_content_type(content.value[0])) {
    raise(Errc::invalid_record, "unknown content type");
  }
  if (content.value.size() - 1 > kMaxContentPayload) {
    raise(Errc::invalid_record, "content payload exceeds 2^24 bytes");
  }
  r.content.type = static_cast<ContentType>(content.value[0]);
  r.content.payload = Bytes(content.value.begin() + 1, content.value.end());
  return {std::move(r), rd.consumed()};
}

Bytes encode_log(const Log& log) {
  Bytes out;
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    if (log.records[i].recnum != i) {
      raise(Errc::sequence_violation,
            "record " + std::to_string(i) + " carries recnum " +
                std::to_string(log.records[i].recnum));
    }
    append(out, encode_record(log.records[i]));
  }
  return out;
}

Log decode_log(BytesView b) {
  Log log;
  std::size_t offset = 0;
  std::uint64_t index = 0;
  while (offset < b.size()) {
    Record rec;
    std::size_t used = 0;
    try {
      auto decoded = decode_record(b.subspan(offset));
      rec = std::move(decoded.first);
      used = decoded.second;
    } catch (const Error& e) {
      throw Error(e.code(), "record " + std::to_string(index) +
                                " at byte offset " + std::to_string(offset) +
                                ": " + e.what());
    }
    if (rec.recnum != index) {
      raise(Errc::sequence_violation,
            "record at byte offset " + std::to_string(offset) +
                " carries recnum " + std::to_string(rec.recnum) +
                ", expected " + std::to_string(index));
    }
    log.records.push_back(std::move(rec));
    offset += used;
    ++index;
  }
  return log;
}

SourceReport validate_log_for_source(const Log& log, LogSource source) {
  SourceReport report;
  for (const Record& r : log.records) {
    bool ok = source == LogSource::firmware ? r.pcr_index <= 9
                                            : r.pcr_index == 10;
    if (!ok) {
      report.offending.push_back(SourceFinding{r.recnum, r.pcr_index});
    }
  }
  return report;
}

std::string to_debug_text(const Log& log) {
  std::ostringstream out;
  out << "# cel-debug v1\n";
  for (const Record& r : log.records) {
    out << "rec " << r.recnum << " pcr " << r.pcr_index << " digests ";
    for (std::size_t i = 0; i < r.digests.size(); ++i) {
      if (i != 0) out << ",";
      out << to_hex(Bytes{static_cast<std::uint8_t>(r.digests[i].alg)}) << ":"
          << to_hex(r.digests[i].value);
    }
    out << " content " << to_hex(Bytes{static_cast<std::uint8_t>(r.content.type)})
        << " " << (r.content.payload.empty() ? "-" : to_hex(r.content.payload))
        << "\n";
  }
  return out.str();
}

Log from_debug_text(std::string_view text) {
  Log log;
  std::istringstream lines{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    auto bad = [&](const std::string& why) {
      raise(Errc::invalid_argument,
            "debug line " + std::to_string(lineno) + ": " + why);
    };
    if (word != "rec") bad("expected 'rec'");
    Record r;
    std::string pcr_kw, digests_kw, digest_list, content_kw, type_hex, payload_hex;
    if (!(fields >> r.recnum >> pcr_kw >> r.pcr_index >> digests_kw >>
          digest_list >> content_kw >> type_hex >> payload_hex) ||
        pcr_kw != "pcr" || digests_kw != "digests" || content_kw != "content") {
      bad("expected 'rec N pcr N digests ... content TT HH'");
    }
    std::istringstream digest_items(digest_list);
    std::string item;
    while (std::getline(digest_items, item, ',')) {
      auto colon = item.find(':');
      if (colon == std::string::npos) bad("digest entry lacks ':'");
      Bytes alg_byte = from_hex(item.substr(0, colon));
      if (alg_byte.size() != 1) bad("algorithm id must be one hex byte");
      auto alg = hash_alg_from_id(alg_byte[0]);
      if (!alg) {
        raise(Errc::unknown_algorithm,
              "debug line " + std::to_string(lineno) + ": algorithm id " +
                  std::to_string(alg_byte[0]));
      }
      r.digests.push_back(Digest{*alg, from_hex(item.substr(colon + 1))});
    }
    Bytes type_byte = from_hex(type_hex);
    if (type_byte.size() != 1 || !valid_content_type(type_byte[0])) {
      bad("content type must be one of 01, 02, 03");
    }
    r.content.type = static_cast<ContentType>(type_byte[0]);
    r.content.payload = payload_hex == "-" ? Bytes{} : from_hex(payload_hex);
    validate_record(r);
    log.records.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    if (log.records[i].recnum != i) {
      raise(Errc::sequence_violation,
            "debug record " + std::to_string(i) + " carries recnum " +
                std::to_string(log.records[i].recnum));
    }
  }
  return log;
}

}  // namespace attest::cel
