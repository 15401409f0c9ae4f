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

#include "attest/tlv.hpp"

#include <limits>
#include <string>

namespace attest::tlv {

Writer& Writer::field(std::uint8_t tag, BytesView value) {
  if (value.size() > std::numeric_limits<std::uint32_t>::max()) {
    raise(Errc::invalid_argument, "tlv value too large");
  }
  out_.push_back(tag);
  put_u32be(out_, static_cast<std::uint32_t>(value.size()));
  append(out_, value);
  return *this;
}

Writer& Writer::field_u32(std::uint8_t tag, std::uint32_t value) {
  Bytes v;
  put_u32be(v, value);
  return field(tag, v);
}

Writer& Writer::field_u64(std::uint8_t tag, std::uint64_t value) {
  Bytes v;
  put_u64be(v, value);
  return field(tag, v);
}

Field Reader::next() {
  if (data_.size() - pos_ < 5) {
    raise(Errc::truncated,
          "tlv header needs 5 bytes at offset " + std::to_string(pos_));
  }
  std::uint8_t tag = data_[pos_];
  std::uint32_t len = read_u32be(data_.data() + pos_ + 1);
  if (data_.size() - pos_ - 5 < len) {
    raise(Errc::truncated, "tlv value of " + std::to_string(len) +
                               " bytes overruns input at offset " +
                               std::to_string(pos_));
  }
  Field f{tag, data_.subspan(pos_ + 5, len)};
  pos_ += 5 + static_cast<std::size_t>(len);
  return f;
}

Field Reader::expect(std::uint8_t tag) {
  Field f = next();
  if (f.tag != tag) {
    raise(Errc::unknown_tag, "expected tag " + std::to_string(tag) + ", found " +
                                 std::to_string(f.tag));
  }
  return f;
}

std::uint32_t Reader::expect_u32(std::uint8_t tag) {
  Field f = expect(tag);
  if (f.value.size() != 4) {
    raise(Errc::invalid_record, "fixed-width field of tag " +
                                    std::to_string(tag) + " must be 4 bytes");
  }
  return read_u32be(f.value.data());
}

std::uint64_t Reader::expect_u64(std::uint8_t tag) {
  Field f = expect(tag);
  if (f.value.size() != 8) {
    raise(Errc::invalid_record, "fixed-width field of tag " +
                                    std::to_string(tag) + " must be 8 bytes");
  }
  return read_u64be(f.value.data());
}

}  // namespace attest::tlv
