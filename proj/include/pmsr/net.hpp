// Copyright 2026 The pmsr-pir Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Blocking TCP transport for framed messages (POSIX sockets).

#ifndef PMSR_NET_HPP_
#define PMSR_NET_HPP_

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pmsr/error.hpp"
#include "pmsr/wire.hpp"

namespace pmsr::net {

using Millis = std::chrono::milliseconds;

inline constexpr Millis kDefaultTimeout{5000};
inline constexpr int kDefaultRetries = 2;

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;

  static Endpoint parse(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
      throw Error(ErrorCode::kInvalidArgument, "address must be host:port, got '" + text + "'");
    }
    Endpoint e;
    e.host = text.substr(0, colon);
    try {
      std::size_t used = 0;
      const unsigned long p = std::stoul(text.substr(colon + 1), &used);
      if (used != text.size() - colon - 1 || p > 65535) throw std::out_of_range("port");
      e.port = static_cast<std::uint16_t>(p);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kInvalidArgument, "bad port in '" + text + "'");
    }
    return e;
  }

  std::string str() const { return host + ":" + std::to_string(port); }

  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

[[noreturn]] inline void transport_error(const std::string& what) {
  throw Error(ErrorCode::kTransport, what);
}

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Socket& operator=(Socket&& o) noexcept {
    if (this != &o) {
      close();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { close(); }

  int fd() const noexcept { return fd_; }
  bool valid() const noexcept { return fd_ >= 0; }
  void close() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }
  void shutdown() noexcept {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
  }

 private:
  int fd_ = -1;
};

// Waits for `events` on fd. False on timeout.
inline bool wait_fd(int fd, short events, Millis timeout) {
  pollfd p{fd, events, 0};
  while (true) {
    const int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (rc > 0) return true;
    if (rc == 0) return false;
    if (errno != EINTR) transport_error(std::string("poll: ") + std::strerror(errno));
  }
}

inline void send_all(int fd, const std::uint8_t* data, std::size_t len, Millis timeout) {
  while (len > 0) {
    if (!wait_fd(fd, POLLOUT, timeout)) transport_error("send timed out");
    const ssize_t sent = ::send(fd, data, len, MSG_NOSIGNAL);
    if (sent < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      transport_error(std::string("send: ") + std::strerror(errno));
    }
    data += sent;
    len -= static_cast<std::size_t>(sent);
  }
}

// Reads exactly len bytes. Returns false on a clean EOF before any byte.
inline bool recv_all(int fd, std::uint8_t* data, std::size_t len, Millis timeout) {
  std::size_t got = 0;
  while (got < len) {
    if (!wait_fd(fd, POLLIN, timeout)) transport_error("receive timed out");
    const ssize_t n = ::recv(fd, data + got, len - got, 0);
    if (n == 0) {
      if (got == 0) return false;
      wire::bad_frame("connection closed mid-frame");
    }
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      transport_error(std::string("recv: ") + std::strerror(errno));
    }
    got += static_cast<std::size_t>(n);
  }
  return true;
}

inline void send_message(int fd, const wire::Message& m, Millis timeout = kDefaultTimeout) {
  const auto frame = wire::encode_frame(m);
  send_all(fd, frame.data(), frame.size(), timeout);
}

// Empty optional on clean EOF. A bad header raises kBadFrame.
inline std::optional<wire::Message> recv_message(int fd, Millis timeout = kDefaultTimeout) {
  std::array<std::uint8_t, 4> header{};
  if (!recv_all(fd, header.data(), 4, timeout)) return std::nullopt;
  const std::uint32_t len = wire::decode_length(header);
  std::vector<std::uint8_t> payload(len);
  if (!recv_all(fd, payload.data(), len, timeout)) wire::bad_frame("connection closed mid-frame");
  return wire::decode_payload(payload);
}

inline addrinfo* resolve(const Endpoint& e, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(e.port);
  const int rc = ::getaddrinfo(e.host.empty() ? nullptr : e.host.c_str(), port.c_str(), &hints, &res);
  if (rc != 0) transport_error("cannot resolve " + e.str() + ": " + ::gai_strerror(rc));
  return res;
}

inline Socket connect_to(const Endpoint& e, Millis timeout = kDefaultTimeout) {
  addrinfo* res = resolve(e, false);
  std::string last = "no address";
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    Socket s(::socket(ai->ai_family, ai->ai_socktype | SOCK_NONBLOCK | SOCK_CLOEXEC, ai->ai_protocol));
    if (!s.valid()) continue;
    int rc = ::connect(s.fd(), ai->ai_addr, ai->ai_addrlen);
    if (rc < 0 && errno == EINPROGRESS) {
      if (!wait_fd(s.fd(), POLLOUT, timeout)) {
        last = "connect timed out";
        continue;
      }
      int err = 0;
      socklen_t len = sizeof(err);
      ::getsockopt(s.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
      rc = err == 0 ? 0 : -1;
      errno = err;
    }
    if (rc == 0) {
      int one = 1;
      ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
      ::freeaddrinfo(res);
      return s;
    }
    last = std::strerror(errno);
  }
  ::freeaddrinfo(res);
  transport_error("cannot connect to " + e.str() + ": " + last);
}

class Listener {
 public:
  explicit Listener(const Endpoint& e) {
    addrinfo* res = resolve(e, true);
    for (addrinfo* ai = res; ai && !sock_.valid(); ai = ai->ai_next) {
      Socket s(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol));
      if (!s.valid()) continue;
      int one = 1;
      ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
      if (::bind(s.fd(), ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(s.fd(), 64) == 0) {
        sock_ = std::move(s);
      }
    }
    ::freeaddrinfo(res);
    if (!sock_.valid()) {
      transport_error("cannot listen on " + e.str() + ": " + std::strerror(errno));
    }
    sockaddr_in addr{};
    socklen_t len = sizeof(addr);
    ::getsockname(sock_.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
  }

  std::uint16_t port() const noexcept { return port_; }

  // Invalid socket on timeout.
  Socket accept(Millis timeout) {
    if (!wait_fd(sock_.fd(), POLLIN, timeout)) return Socket();
    Socket s(::accept4(sock_.fd(), nullptr, nullptr, SOCK_CLOEXEC));
    if (s.valid()) {
      int one = 1;
      ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    }
    return s;
  }

 private:
  Socket sock_;
  std::uint16_t port_ = 0;
};

// A persistent connection to one node. Transport failures reconnect and
// retry; ERROR replies are returned to the caller untouched.
class Client {
 public:
  explicit Client(Endpoint e, Millis timeout = kDefaultTimeout, int retries = kDefaultRetries)
      : endpoint_(std::move(e)), timeout_(timeout), retries_(retries) {}

  const Endpoint& endpoint() const noexcept { return endpoint_; }

  wire::Message call(const wire::Message& request) {
    std::string last;
    for (int attempt = 0; attempt <= retries_; ++attempt) {
      try {
        if (!sock_.valid()) sock_ = connect_to(endpoint_, timeout_);
        send_message(sock_.fd(), request, timeout_);
        auto reply = recv_message(sock_.fd(), timeout_);
        if (!reply) transport_error("connection closed by " + endpoint_.str());
        return std::move(*reply);
      } catch (const Error& e) {
        sock_.close();
        if (e.code() != ErrorCode::kTransport && e.code() != ErrorCode::kBadFrame) throw;
        last = e.what();
      }
    }
    transport_error(endpoint_.str() + " unreachable: " + last);
  }

 private:
  Endpoint endpoint_;
  Millis timeout_;
  int retries_;
  Socket sock_;
};

}  // namespace pmsr::net

#endif  // PMSR_NET_HPP_
