#include "http/client.hpp"

#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "common/error.hpp"
#include "common/strings.hpp"

namespace ufu::http {

namespace {

using Clock = std::chrono::steady_clock;

struct Fd {
  int fd = -1;
  ~Fd() {
    if (fd >= 0) ::close(fd);
  }
};

int remaining_ms(Clock::time_point deadline) {
  auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
  if (left.count() <= 0) raise(ErrorCode::timeout, "deadline exceeded");
  return static_cast<int>(left.count());
}

void wait_ready(int fd, short events, Clock::time_point deadline) {
  pollfd pfd{fd, events, 0};
  int rc = ::poll(&pfd, 1, remaining_ms(deadline));
  if (rc == 0) raise(ErrorCode::timeout, "deadline exceeded");
  if (rc < 0) raise(ErrorCode::connection_error, std::strerror(errno));
}

int connect_with_deadline(const Endpoint& endpoint, Clock::time_point deadline) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* results = nullptr;
  std::string port = std::to_string(endpoint.port);
  if (::getaddrinfo(endpoint.host.c_str(), port.c_str(), &hints, &results) != 0) {
    raise(ErrorCode::connection_error, "cannot resolve " + endpoint.host);
  }

  std::string last_error = "no addresses";
  for (addrinfo* ai = results; ai != nullptr; ai = ai->ai_next) {
    Fd sock{::socket(ai->ai_family, ai->ai_socktype | SOCK_NONBLOCK, ai->ai_protocol)};
    if (sock.fd < 0) continue;
    int rc = ::connect(sock.fd, ai->ai_addr, ai->ai_addrlen);
    if (rc != 0 && errno != EINPROGRESS) {
      last_error = std::strerror(errno);
      continue;
    }
    if (rc != 0) {
      pollfd pfd{sock.fd, POLLOUT, 0};
      int pr;
      try {
        pr = ::poll(&pfd, 1, remaining_ms(deadline));
      } catch (...) {
        ::freeaddrinfo(results);
        throw;
      }
      if (pr == 0) {
        ::freeaddrinfo(results);
        raise(ErrorCode::timeout, "connect timed out");
      }
      int err = 0;
      socklen_t len = sizeof(err);
      ::getsockopt(sock.fd, SOL_SOCKET, SO_ERROR, &err, &len);
      if (err != 0) {
        last_error = std::strerror(err);
        continue;
      }
    }
    int fd = sock.fd;
    sock.fd = -1;
    ::freeaddrinfo(results);
    return fd;
  }
  ::freeaddrinfo(results);
  raise(ErrorCode::connection_error, "connect to " + endpoint.authority() + ": " + last_error);
}

void send_all(int fd, std::string_view bytes, Clock::time_point deadline) {
  size_t off = 0;
  while (off < bytes.size()) {
    ssize_t n = ::send(fd, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
    if (n > 0) {
      off += static_cast<size_t>(n);
      continue;
    }
    if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
      wait_ready(fd, POLLOUT, deadline);
      continue;
    }
    raise(ErrorCode::connection_error, "send failed");
  }
}

// Reads more bytes into buf; returns false on orderly EOF.
bool read_some(int fd, std::string& buf, Clock::time_point deadline) {
  char chunk[16384];
  for (;;) {
    ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
    if (n > 0) {
      buf.append(chunk, static_cast<size_t>(n));
      return true;
    }
    if (n == 0) return false;
    if (errno == EAGAIN || errno == EWOULDBLOCK) {
      wait_ready(fd, POLLIN, deadline);
      continue;
    }
    raise(ErrorCode::connection_error, "recv failed");
  }
}

} // namespace

ParsedUrl parse_url(std::string_view url) {
  constexpr std::string_view scheme = "http://";
  if (!str::istarts_with(url, scheme)) {
    raise(ErrorCode::invalid_argument, "only http:// URLs are supported");
  }
  std::string_view rest = url.substr(scheme.size());
  size_t slash = rest.find('/');
  std::string_view authority = slash == std::string_view::npos ? rest : rest.substr(0, slash);
  std::string_view target = slash == std::string_view::npos ? "/" : rest.substr(slash);
  if (authority.empty()) raise(ErrorCode::invalid_argument, "URL without host");

  ParsedUrl out;
  size_t colon = authority.rfind(':');
  if (colon == std::string_view::npos) {
    out.endpoint.host = std::string(authority);
    out.endpoint.port = 80;
  } else {
    out.endpoint.host = std::string(authority.substr(0, colon));
    int port = 0;
    for (char c : authority.substr(colon + 1)) {
      if (c < '0' || c > '9') raise(ErrorCode::invalid_argument, "bad port");
      port = port * 10 + (c - '0');
    }
    if (port < 1 || port > 65535) raise(ErrorCode::invalid_argument, "bad port");
    out.endpoint.port = static_cast<std::uint16_t>(port);
  }
  out.target = std::string(target);
  return out;
}

HttpResponse http_roundtrip(const Endpoint& endpoint, const HttpRequest& request,
                            std::chrono::milliseconds deadline) {
  auto limit = Clock::now() + deadline;
  Fd sock{connect_with_deadline(endpoint, limit)};
  send_all(sock.fd, serialize_request(request, endpoint.authority()), limit);

  std::string buf;
  size_t header_end;
  while ((header_end = buf.find("\r\n\r\n")) == std::string::npos) {
    if (buf.size() > 1 << 20) raise(ErrorCode::connection_error, "oversized response header");
    if (!read_some(sock.fd, buf, limit)) {
      raise(ErrorCode::connection_error, "connection closed before response header");
    }
  }

  HttpResponse resp;
  std::string_view head(buf.data(), header_end);
  size_t line_end = head.find("\r\n");
  std::string_view status_line = head.substr(0, line_end);
  if (!str::istarts_with(status_line, "HTTP/1.")) {
    raise(ErrorCode::connection_error, "not an HTTP/1.x response");
  }
  size_t sp1 = status_line.find(' ');
  if (sp1 == std::string_view::npos || sp1 + 4 > status_line.size()) {
    raise(ErrorCode::connection_error, "bad status line");
  }
  int status = 0;
  for (size_t i = sp1 + 1; i < sp1 + 4 && i < status_line.size(); ++i) {
    char c = status_line[i];
    if (c < '0' || c > '9') raise(ErrorCode::connection_error, "bad status code");
    status = status * 10 + (c - '0');
  }
  if (status < 100 || status > 599) raise(ErrorCode::connection_error, "status out of range");
  resp.status = status;

  size_t pos = line_end == std::string_view::npos ? head.size() : line_end + 2;
  while (pos < head.size()) {
    size_t eol = head.find("\r\n", pos);
    if (eol == std::string_view::npos) eol = head.size();
    std::string_view line = head.substr(pos, eol - pos);
    pos = eol + 2;
    size_t colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    resp.headers.emplace_back(std::string(str::trim(line.substr(0, colon))),
                              std::string(str::trim(line.substr(colon + 1))));
  }

  std::string body = buf.substr(header_end + 4);
  if (auto cl = resp.header("Content-Length")) {
    size_t want = 0;
    for (char c : *cl) {
      if (c < '0' || c > '9') raise(ErrorCode::connection_error, "bad Content-Length");
      want = want * 10 + static_cast<size_t>(c - '0');
      if (want > (size_t{1} << 30)) raise(ErrorCode::connection_error, "response too large");
    }
    while (body.size() < want) {
      if (!read_some(sock.fd, body, limit)) {
        raise(ErrorCode::connection_error, "connection closed mid-body");
      }
    }
    body.resize(want);
  } else {
    while (read_some(sock.fd, body, limit)) {
      if (body.size() > (size_t{1} << 30)) raise(ErrorCode::connection_error, "response too large");
    }
  }
  resp.body = std::move(body);
  return resp;
}

} // namespace ufu::http
