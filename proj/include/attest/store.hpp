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
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "attest/verifier.hpp"

namespace attest::store {

Bytes encode_template(const verifier::GoldenTemplate& t);
verifier::GoldenTemplate decode_template(BytesView b);

/// File-backed golden-template store. The file is a sequence of TLV-framed
/// templates (last record wins per device_id); commits write a temp file and
/// rename it over the old one, so a crash mid-write never corrupts committed
/// records. Loading tolerates a truncated tail.
class EnrollmentStore {
 public:
  explicit EnrollmentStore(std::filesystem::path path);

  std::optional<verifier::GoldenTemplate> find(const std::string& device_id) const;
  void put(const verifier::GoldenTemplate& t);
  std::size_t size() const;
  std::vector<std::string> device_ids() const;

 private:
  void load();
  void commit_locked();

  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::map<std::string, verifier::GoldenTemplate> records_;
};

}  // namespace attest::store
