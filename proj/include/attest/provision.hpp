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

#include <span>
#include <string>
#include <vector>

#include "attest/boot.hpp"
#include "attest/cel.hpp"
#include "attest/credential.hpp"
#include "attest/tpm.hpp"

namespace attest::provision {

// Builds the supply-chain side of one device, deterministically from a
// device seed: EK/AK on the TPM, the root/vendor CAs, the platform and
// platform-attributes credentials with their cross-bindings, and the AK
// credential certified under the EK. EK and platform credentials are stored
// in TPM NV and ownership is taken.

struct DeviceCredentials {
  cred::Credential root;
  cred::Credential vendor_ca;
  cred::Credential ek;
  cred::Credential platform;
  cred::Credential attrs;
  cred::Credential ak;

  std::vector<cred::Credential> all() const {
    return {root, vendor_ca, ek, platform, attrs, ak};
  }
};

DeviceCredentials issue_device_credentials(tpm::TpmDevice& tpm, BytesView seed,
                                           const std::string& device_id);

/// Device state a prover agent runs from: a booted TPM, its credentials, and
/// the logs it will present.
struct ProverContext {
  std::string device_id;
  Bytes psk;
  tpm::TpmDevice tpm;
  DeviceCredentials credentials;
  cel::Log firmware_log;
  cel::Log ima_log;
  std::vector<std::pair<std::string, std::string>> device_info;
};

ProverContext make_prover_context(BytesView seed, const std::string& device_id,
                                  const boot::BootImage& image,
                                  std::span<const boot::MeasuredFile> files,
                                  Bytes psk);

// Small fixed image for demos and smoke tests.
boot::BootImage sample_boot_image();

}  // namespace attest::provision
