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

#include "attest/net.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "attest/error.hpp"

namespace attest::net {

namespace {

[[noreturn]] void raise_errno(Errc code, const std::string& what) {
  raise(code, what + ": " + std::strerror(errno));
}

sockaddr_in make_addr(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    raise(Errc::bad_config, "not an IPv4 address: " + host);
  }
  return addr;
}

}  // namespace

Socket::~Socket() { close(); }

Socket::Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.fd_;
    other.fd_ = -1;
  }
  return *this;
}

void Socket::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

Socket Socket::connect(const std::string& host, std::uint16_t port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) raise_errno(Errc::io_error, "socket");
  Socket s(fd);
  sockaddr_in addr = make_addr(host, port);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    raise_errno(Errc::io_error, "connect to " + host + ":" + std::to_string(port));
  }
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return s;
}

void Socket::set_recv_timeout(std::chrono::milliseconds ms) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(ms.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((ms.count() % 1000) * 1000);
  ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
}

void Socket::send_all(BytesView data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      raise_errno(Errc::io_error, "send");
    }
    sent += static_cast<std::size_t>(n);
  }
}

Bytes Socket::recv_exact(std::size_t n) {
  Bytes out(n);
  std::size_t got = 0;
  while (got < n) {
    ssize_t r = ::recv(fd_, out.data() + got, n - got, 0);
    if (r == 0) {
      raise(Errc::io_error, "peer closed mid-message");
    }
    if (r < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) {
        raise(Errc::timeout, "read deadline exceeded");
      }
      raise_errno(Errc::io_error, "recv");
    }
    got += static_cast<std::size_t>(r);
  }
  return out;
}

Listener::~Listener() { close(); }

Listener::Listener(Listener&& other) noexcept
    : fd_(other.fd_), port_(other.port_) {
  other.fd_ = -1;
}

Listener& Listener::operator=(Listener&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.fd_;
    port_ = other.port_;
    other.fd_ = -1;
  }
  return *this;
}

void Listener::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

Listener Listener::bind(const std::string& host, std::uint16_t port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) raise_errno(Errc::io_error, "socket");
  Listener l;
  l.fd_ = fd;
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr = make_addr(host, port);
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    raise_errno(Errc::io_error, "bind " + host + ":" + std::to_string(port));
  }
  if (::listen(fd, 128) != 0) {
    raise_errno(Errc::io_error, "listen");
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  if (::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len) != 0) {
    raise_errno(Errc::io_error, "getsockname");
  }
  l.port_ = ntohs(bound.sin_port);
  return l;
}

std::optional<Socket> Listener::accept(std::chrono::milliseconds wait) {
  if (fd_ < 0) return std::nullopt;
  pollfd pfd{fd_, POLLIN, 0};
  int ready = ::poll(&pfd, 1, static_cast<int>(wait.count()));
  if (ready <= 0) return std::nullopt;
  int client = ::accept(fd_, nullptr, nullptr);
  if (client < 0) return std::nullopt;
  int one = 1;
  ::setsockopt(client, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return Socket(client);
}

void write_frame(Socket& s, const wire::Frame& f) {
  s.send_all(wire::encode_frame(f));
}

wire::Frame read_frame(Socket& s) {
  Bytes header = s.recv_exact(4);
  std::uint32_t length = read_u32be(header.data());
  if (length == 0) {
    raise(Errc::malformed_message, "frame length zero");
  }
  if (length > wire::kMaxFramePayload + 1) {
    raise(Errc::frame_too_large,
          "frame length " + std::to_string(length) + " exceeds bound");
  }
  Bytes body = s.recv_exact(length);
  if (body[0] < 0x01 || body[0] > 0x09) {
    raise(Errc::malformed_message,
          "unknown message type " + std::to_string(body[0]));
  }
  return wire::Frame{static_cast<wire::MsgType>(body[0]),
                     Bytes(body.begin() + 1, body.end())};
}

}  // namespace attest::net
