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
#include <random>
#include <string>

#include "attest/boot.hpp"
#include "attest/cel.hpp"
#include "attest/error.hpp"
#include "attest/provision.hpp"
#include "attest/verifier.hpp"

namespace testutil {

using Rng = std::mt19937_64;

attest::Bytes random_bytes(Rng& rng, std::size_t n);
std::uint64_t random_in(Rng& rng, std::uint64_t lo, std::uint64_t hi);

attest::cel::Record random_record(Rng& rng, std::uint64_t recnum);
attest::cel::Log random_log(Rng& rng, std::size_t n_records);

// Random but valid boot image: S-RTM first, firmware on PCR 0-7,
// bootloader/OS on PCR 8/9.
attest::boot::BootImage random_boot_image(Rng& rng, std::size_t n_components);
std::vector<attest::boot::MeasuredFile> random_files(Rng& rng, std::size_t n);

/// One fully provisioned honest device plus the verifier-side view of it.
struct DeviceFixture {
  attest::provision::ProverContext ctx;
  attest::cred::TrustAnchorSet anchors;
  attest::verifier::GoldenTemplate golden;
};

DeviceFixture make_device(Rng& rng, const std::string& device_id);
DeviceFixture make_device(Rng& rng, const std::string& device_id,
                          const attest::boot::BootImage& image,
                          const std::vector<attest::boot::MeasuredFile>& files);

// Golden template exactly as enrollment would derive it from the context.
attest::verifier::GoldenTemplate golden_of(
    const attest::provision::ProverContext& ctx);

// Honest attestation bundle quoting the given nonce over PCRs 0-10.
attest::verifier::Bundle honest_bundle(attest::provision::ProverContext& ctx,
                                       attest::BytesView nonce);

/// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil

// Asserts that `expr` throws attest::Error with the given code.
#define CHECK_ERRC(expr, errc)                                   \
  do {                                                           \
    bool caught_ = false;                                        \
    try {                                                        \
      (void)(expr);                                              \
    } catch (const attest::Error& e_) {                          \
      caught_ = true;                                            \
      CHECK(e_.code() == (errc));                                \
    }                                                            \
    CHECK_MESSAGE(caught_, "expected " << attest::errc_name(errc) \
                                       << " from " << #expr);    \
  } while (0)
