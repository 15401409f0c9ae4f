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

#include "attest/provision.hpp"

#include "attest/crypto.hpp"
#include "attest/error.hpp"

namespace attest::provision {

namespace {

Bytes derive(const char* label, BytesView seed) {
  Bytes preimage = to_bytes(label);
  append(preimage, seed);
  return crypto::sha256(preimage);
}

std::uint64_t derive_serial(const char* label, BytesView seed) {
  Bytes d = derive(label, seed);
  return read_u64be(d.data());
}

}  // namespace

DeviceCredentials issue_device_credentials(tpm::TpmDevice& tpm, BytesView seed,
                                           const std::string& device_id) {
  tpm.create_ek(seed);
  tpm.create_ak();

  auto root_key = crypto::SigningKey::from_seed(derive("pki-root", seed));
  auto vendor_key = crypto::SigningKey::from_seed(derive("pki-vendor", seed));
  auto platform_key = crypto::SigningKey::from_seed(derive("pki-platform", seed));
  auto attrs_key = crypto::SigningKey::from_seed(derive("pki-attrs", seed));

  DeviceCredentials dc;
  dc.root = cred::self_issue_root(root_key, derive_serial("serial-root", seed),
                                  device_id + " supply-chain root");

  cred::CredentialTemplate vendor;
  vendor.serial = derive_serial("serial-vendor", seed);
  vendor.role = cred::Role::tpm_vendor_ca;
  vendor.subject = device_id + " tpm vendor ca";
  vendor.public_key = vendor_key.public_key();
  dc.vendor_ca = cred::issue(dc.root, root_key, vendor);

  cred::CredentialTemplate ek;
  ek.serial = derive_serial("serial-ek", seed);
  ek.role = cred::Role::ek;
  ek.subject = device_id + " endorsement key";
  ek.public_key = tpm.ek_public();
  dc.ek = cred::issue(dc.vendor_ca, vendor_key, ek);

  cred::CredentialTemplate platform;
  platform.serial = derive_serial("serial-platform", seed);
  platform.role = cred::Role::platform;
  platform.subject = device_id + " platform";
  platform.public_key = platform_key.public_key();
  platform.bound_refs = {{cred::Role::ek, cred::fingerprint(dc.ek)}};
  dc.platform = cred::issue(dc.root, root_key, platform);

  cred::CredentialTemplate attrs;
  attrs.serial = derive_serial("serial-attrs", seed);
  attrs.role = cred::Role::platform_attributes;
  attrs.subject = device_id + " platform attributes";
  attrs.public_key = attrs_key.public_key();
  attrs.attributes = {
      {"component.0.name", "tpm2.0"},
      {"component.0.mutable", "false"},
      {"component.1.name", "mainboard"},
      {"component.1.mutable", "false"},
      {"component.2.name", "nic"},
      {"component.2.mutable", "true"},
  };
  attrs.bound_refs = {{cred::Role::platform, cred::fingerprint(dc.platform)}};
  dc.attrs = cred::issue(dc.root, root_key, attrs);

  dc.ak = cred::certify_ak(dc.ek, tpm.ek_key(), tpm.ak_public(),
                           derive_serial("serial-ak", seed),
                           device_id + " attestation key");

  tpm.nv_write(tpm::kNvIndexEkCert, cred::encode_credential(dc.ek));
  tpm.nv_write(tpm::kNvIndexPlatformCert, cred::encode_credential(dc.platform));
  tpm.take_ownership(to_bytes(device_id));
  return dc;
}

ProverContext make_prover_context(BytesView seed, const std::string& device_id,
                                  const boot::BootImage& image,
                                  std::span<const boot::MeasuredFile> files,
                                  Bytes psk) {
  ProverContext ctx;
  ctx.device_id = device_id;
  ctx.psk = std::move(psk);
  ctx.credentials = issue_device_credentials(ctx.tpm, seed, device_id);
  ctx.firmware_log = boot::run_boot(image, ctx.tpm);
  ctx.ima_log = boot::ima_measure(files, ctx.tpm);
  ctx.device_info = {
      {"device", device_id},
      {"bios", "simulated uefi 1.0"},
      {"os", "linux (simulated)"},
  };
  return ctx;
}

boot::BootImage sample_boot_image() {
  boot::BootImage image;
  image.components = {
      {"s-rtm", to_bytes("srtm code v1"), 0, boot::ComponentKind::srtm},
      {"uefi-core", to_bytes("uefi core v2"), 0, boot::ComponentKind::firmware},
      {"nic-oprom", to_bytes("nic option rom"), 2, boot::ComponentKind::firmware},
      {"shimx64", to_bytes("shim loader"), 8, boot::ComponentKind::bootloader},
      {"grub2", to_bytes("grub stage 2"), 8, boot::ComponentKind::bootloader},
      {"vmlinuz", to_bytes("kernel image"), 9, boot::ComponentKind::os},
  };
  return image;
}

}  // namespace attest::provision
