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

#include "attest/boot.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "attest/crypto.hpp"
#include "attest/error.hpp"

namespace attest::boot {

const std::string_view kPlatformInfoEvent =
    "pc-client platform firmware profile; algorithms=sha1,sha256";

const char* component_kind_name(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::srtm: return "srtm";
    case ComponentKind::firmware: return "firmware";
    case ComponentKind::bootloader: return "bootloader";
    case ComponentKind::os: return "os";
  }
  return "unknown";
}

void validate_image(const BootImage& image) {
  if (image.components.empty()) {
    raise(Errc::invalid_image, "boot image has no components");
  }
  for (std::size_t i = 0; i < image.components.size(); ++i) {
    const FirmwareComponent& c = image.components[i];
    if (i == 0 && c.kind != ComponentKind::srtm) {
      raise(Errc::invalid_image, "first component must be the S-RTM");
    }
    if (i != 0 && c.kind == ComponentKind::srtm) {
      raise(Errc::invalid_image, "S-RTM must be first and unique");
    }
    switch (c.kind) {
      case ComponentKind::srtm:
      case ComponentKind::firmware:
        if (c.pcr_index > 7) {
          raise(Errc::invalid_image, "component '" + c.name +
                                         "' of kind " +
                                         component_kind_name(c.kind) +
                                         " must use PCR 0-7");
        }
        break;
      case ComponentKind::bootloader:
      case ComponentKind::os:
        if (c.pcr_index != 8 && c.pcr_index != 9) {
          raise(Errc::invalid_image, "component '" + c.name +
                                         "' of kind " +
                                         component_kind_name(c.kind) +
                                         " must use PCR 8 or 9");
        }
        break;
    }
  }
}

namespace {

// MEASURE + EXTEND + log: hashes the measured bytes, extends both banks at
// pcr, and appends the record.
void measure_extend_log(cel::Log& log, tpm::TpmDevice& tpm, std::uint32_t pcr,
                        BytesView measured, cel::ContentType type,
                        Bytes payload) {
  cel::Digest d1{cel::HashAlg::sha1, crypto::sha1(measured)};
  cel::Digest d256{cel::HashAlg::sha256, crypto::sha256(measured)};
  tpm.pcr_extend(cel::HashAlg::sha1, pcr, d1);
  tpm.pcr_extend(cel::HashAlg::sha256, pcr, d256);
  cel::Record rec;
  rec.recnum = log.records.size();
  rec.pcr_index = pcr;
  rec.digests = {std::move(d1), std::move(d256)};
  rec.content = cel::Content{type, std::move(payload)};
  log.records.push_back(std::move(rec));
}

}  // namespace

cel::Log run_boot(const BootImage& image, tpm::TpmDevice& tpm) {
  validate_image(image);
  if (!tpm.at_reset()) {
    raise(Errc::invalid_argument, "tpm is not at reset");
  }
  cel::Log log;
  measure_extend_log(log, tpm, 0, to_bytes(kPlatformInfoEvent),
                     cel::ContentType::pc_client_info,
                     to_bytes(kPlatformInfoEvent));
  for (const FirmwareComponent& c : image.components) {
    measure_extend_log(log, tpm, c.pcr_index, c.code, cel::ContentType::firmware,
                       to_bytes(c.name));
  }
  return log;
}

cel::Log ima_measure(std::span<const MeasuredFile> files, tpm::TpmDevice& tpm) {
  std::set<std::string> seen;
  for (const MeasuredFile& f : files) {
    if (!seen.insert(f.path).second) {
      raise(Errc::invalid_argument, "duplicate measured path " + f.path);
    }
  }
  cel::Log log;
  for (const MeasuredFile& f : files) {
    Bytes measured = to_bytes(f.path);
    measured.push_back(0x00);
    append(measured, f.contents);
    cel::Digest d{cel::HashAlg::sha256, crypto::sha256(measured)};
    tpm.pcr_extend(cel::HashAlg::sha256, 10, d);

    Bytes payload = to_bytes(f.path);
    payload.push_back(0x00);
    append(payload, d.value);

    cel::Record rec;
    rec.recnum = log.records.size();
    rec.pcr_index = 10;
    rec.digests = {std::move(d)};
    rec.content = cel::Content{cel::ContentType::ima, std::move(payload)};
    log.records.push_back(std::move(rec));
  }
  return log;
}

cel::Log tamper(const cel::Log& log, std::uint64_t recnum,
                const Mutation& mutation) {
  cel::Log out = log;
  auto it = std::find_if(out.records.begin(), out.records.end(),
                         [&](const cel::Record& r) { return r.recnum == recnum; });
  if (it == out.records.end()) {
    raise(Errc::record_absent, "recnum " + std::to_string(recnum));
  }
  std::uint8_t mask = mutation.xor_mask == 0 ? 0x01 : mutation.xor_mask;
  if (mutation.target == Mutation::Target::content) {
    if (it->content.payload.empty()) {
      // Nothing to flip; rotate the content type through the valid set.
      auto t = static_cast<std::uint8_t>(it->content.type);
      it->content.type = static_cast<cel::ContentType>(t % 3 + 1);
    } else {
      std::size_t pos = mutation.byte_offset % it->content.payload.size();
      it->content.payload[pos] ^= mask;
    }
  } else {
    cel::Digest* d = nullptr;
    for (cel::Digest& cand : it->digests) {
      if (cand.alg == cel::HashAlg::sha256) d = &cand;
    }
    if (d == nullptr) d = &it->digests.front();
    std::size_t pos = mutation.byte_offset % d->value.size();
    d->value[pos] ^= mask;
  }
  return out;
}

namespace {

ComponentKind parse_kind(const std::string& word) {
  if (word == "srtm") return ComponentKind::srtm;
  if (word == "firmware") return ComponentKind::firmware;
  if (word == "bootloader") return ComponentKind::bootloader;
  if (word == "os") return ComponentKind::os;
  raise(Errc::bad_config, "unknown component kind '" + word + "'");
}

Bytes read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(Errc::io_error, "cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string s = buf.str();
  return Bytes(s.begin(), s.end());
}

}  // namespace

BootImage parse_boot_manifest(std::string_view text,
                              const std::filesystem::path& base_dir) {
  BootImage image;
  std::istringstream lines{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string kind_word, name, code_word;
    std::uint32_t pcr = 0;
    if (!(fields >> kind_word)) continue;  // blank line
    if (!(fields >> pcr >> name >> code_word)) {
      raise(Errc::bad_config,
            "manifest line " + std::to_string(lineno) +
                ": expected 'kind pcr_index name hex_or_@file'");
    }
    FirmwareComponent c;
    c.kind = parse_kind(kind_word);
    c.pcr_index = pcr;
    c.name = name;
    if (!code_word.empty() && code_word[0] == '@') {
      c.code = read_file_bytes(base_dir / code_word.substr(1));
    } else {
      try {
        c.code = from_hex(code_word);
      } catch (const Error& e) {
        raise(Errc::bad_config,
              "manifest line " + std::to_string(lineno) + ": " + e.what());
      }
    }
    image.components.push_back(std::move(c));
  }
  return image;
}

BootImage load_boot_manifest(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) {
    raise(Errc::io_error, "cannot read " + manifest_path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_boot_manifest(buf.str(), manifest_path.parent_path());
}

std::vector<MeasuredFile> collect_files(const std::filesystem::path& dir) {
  std::vector<MeasuredFile> files;
  if (!std::filesystem::is_directory(dir)) {
    raise(Errc::io_error, dir.string() + " is not a directory");
  }
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    MeasuredFile f;
    f.path = std::filesystem::relative(entry.path(), dir).generic_string();
    f.contents = read_file_bytes(entry.path());
    files.push_back(std::move(f));
  }
  std::sort(files.begin(), files.end(),
            [](const MeasuredFile& a, const MeasuredFile& b) {
              return a.path < b.path;
            });
  return files;
}

}  // namespace attest::boot
