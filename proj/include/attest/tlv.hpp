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

#include <cstdint>

#include "attest/bytes.hpp"
#include "attest/error.hpp"

namespace attest::tlv {

// One encoding discipline for everything in this project that needs
// deterministic bytes: a field is [tag 1B][length 4B big-endian][value].
// Field order within a structure is fixed by the structure's codec.

class Writer {
 public:
  Writer& field(std::uint8_t tag, BytesView value);
  Writer& field_u32(std::uint8_t tag, std::uint32_t value);
  Writer& field_u64(std::uint8_t tag, std::uint64_t value);

  const Bytes& bytes() const { return out_; }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

struct Field {
  std::uint8_t tag;
  BytesView value;
};

class Reader {
 public:
  explicit Reader(BytesView data) : data_(data) {}

  bool done() const { return pos_ == data_.size(); }
  std::size_t consumed() const { return pos_; }

  // Throws Errc::truncated if fewer than a whole field remains.
  Field next();
  // Like next(), but throws Errc::unknown_tag if the tag differs.
  Field expect(std::uint8_t tag);
  // Fixed-width integer fields; wrong widths are Errc::invalid_record.
  std::uint32_t expect_u32(std::uint8_t tag);
  std::uint64_t expect_u64(std::uint8_t tag);

 private:
  BytesView data_;
  std::size_t pos_ = 0;
};

}  // namespace attest::tlv
