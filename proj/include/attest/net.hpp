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

#include <chrono>
#include <optional>
#include <string>

#include "attest/bytes.hpp"
#include "attest/wire.hpp"

namespace attest::net {

/// Connected TCP stream, move-only, closed on destruction.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket();
  Socket(Socket&& other) noexcept;
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  static Socket connect(const std::string& host, std::uint16_t port);

  void set_recv_timeout(std::chrono::milliseconds ms);
  void send_all(BytesView data);
  // Throws Errc::timeout when the deadline passes, Errc::io_error when the
  // peer closes early.
  Bytes recv_exact(std::size_t n);

  bool valid() const { return fd_ >= 0; }
  void close();

 private:
  int fd_ = -1;
};

class Listener {
 public:
  Listener() = default;
  ~Listener();
  Listener(Listener&& other) noexcept;
  Listener& operator=(Listener&& other) noexcept;
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;

  // port 0 picks an ephemeral port; port() reports the bound one.
  static Listener bind(const std::string& host, std::uint16_t port);

  std::uint16_t port() const { return port_; }
  // Waits up to `wait` for a connection; nullopt on timeout or after close().
  std::optional<Socket> accept(std::chrono::milliseconds wait);
  void close();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

// Frame IO over a socket. read_frame never buffers more than one bounded
// frame; an oversized length header throws Errc::frame_too_large before any
// body byte is read.
void write_frame(Socket& s, const wire::Frame& f);
wire::Frame read_frame(Socket& s);

}  // namespace attest::net
