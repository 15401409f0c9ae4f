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

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attest/bytes.hpp"
#include "attest/cel.hpp"
#include "attest/tpm.hpp"

namespace attest::boot {

enum class ComponentKind { srtm, firmware, bootloader, os };

const char* component_kind_name(ComponentKind kind);

struct FirmwareComponent {
  std::string name;
  Bytes code;
  std::uint32_t pcr_index = 0;  // srtm/firmware in [0,7], bootloader/os in {8,9}
  ComponentKind kind = ComponentKind::firmware;
};

struct BootImage {
  std::vector<FirmwareComponent> components;  // execution order
};

// Throws Errc::invalid_image on ordering/placement violations.
void validate_image(const BootImage& image);

// Payload of record 0 of every firmware log; measured and extended like any
// other event.
extern const std::string_view kPlatformInfoEvent;

/// Runs the measured boot chain against a freshly reset TPM. Record 0 is the
/// PC-Client info event into PCR 0; each component is then hashed, extended
/// into its PCR on both banks, and logged with its name as payload.
cel::Log run_boot(const BootImage& image, tpm::TpmDevice& tpm);

struct MeasuredFile {
  std::string path;
  Bytes contents;
};

/// Measures files into PCR 10 (SHA256 bank). Per file, the measured digest is
/// SHA-256(path || 0x00 || contents); the record payload is
/// path || 0x00 || digest.
cel::Log ima_measure(std::span<const MeasuredFile> files, tpm::TpmDevice& tpm);

/// Test/demo helper modelling a software adversary: mutates one record's
/// digest or content in place, keeping the log structurally valid.
struct Mutation {
  enum class Target { content, digest };
  Target target = Target::digest;
  std::size_t byte_offset = 0;
  std::uint8_t xor_mask = 0x01;  // zero is coerced to 0x01
};

cel::Log tamper(const cel::Log& log, std::uint64_t recnum,
                const Mutation& mutation);

// Manifest grammar, one component per line:
//   kind pcr_index name hex_or_@file
// kind in {srtm, firmware, bootloader, os}; '@file' paths resolve against
// base_dir. '#' starts a comment.
BootImage parse_boot_manifest(std::string_view text,
                              const std::filesystem::path& base_dir);
BootImage load_boot_manifest(const std::filesystem::path& manifest_path);

// Reads every regular file under dir (sorted by relative path) as the IMA
// measurement set.
std::vector<MeasuredFile> collect_files(const std::filesystem::path& dir);

}  // namespace attest::boot
