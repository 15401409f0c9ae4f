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

// Straight-line reference implementations used only as test oracles. They
// share no code with the library's crypto backend, so implementation/oracle
// comparisons stay meaningful.

#include <string>

#include "attest/bytes.hpp"

namespace oracle {

attest::Bytes sha1(attest::BytesView data);
attest::Bytes sha256(attest::BytesView data);
attest::Bytes hmac_sha1(attest::BytesView key, attest::BytesView data);
// RFC 4226 dynamic truncation, 8 decimal digits.
std::string hotp8(attest::BytesView key, std::uint64_t counter);

}  // namespace oracle
