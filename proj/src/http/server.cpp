#include "http/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "common/error.hpp"
#include "common/strings.hpp"

namespace ufu::http {

namespace {

constexpr int kIoTimeoutMs = 15000;
constexpr size_t kMaxHeaderBytes = 64 * 1024;
constexpr size_t kMaxBodyBytes = 64 * 1024 * 1024;

bool recv_more(int fd, std::string& buf) {
  pollfd pfd{fd, POLLIN, 0};
  if (::poll(&pfd, 1, kIoTimeoutMs) <= 0) return false;
  char chunk[16384];
  ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
  if (n <= 0) return false;
  buf.append(chunk, static_cast<size_t>(n));
  return true;
}

void send_all(int fd, std::string_view bytes) {
  size_t off = 0;
  while (off < bytes.size()) {
    ssize_t n = ::send(fd, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
    if (n > 0) {
      off += static_cast<size_t>(n);
      continue;
    }
    if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
      pollfd pfd{fd, POLLOUT, 0};
      if (::poll(&pfd, 1, kIoTimeoutMs) <= 0) return;
      continue;
    }
    return; // peer went away; nothing sensible left to do
  }
}

// nullopt means the connection should be dropped without a response.
std::optional<HttpRequest> read_request(int fd, int& error_status) {
  std::string buf;
  size_t header_end;
  while ((header_end = buf.find("\r\n\r\n")) == std::string::npos) {
    if (buf.size() > kMaxHeaderBytes) {
      error_status = 400;
      return std::nullopt;
    }
    if (!recv_more(fd, buf)) return std::nullopt;
  }

  std::string_view head(buf.data(), header_end);
  size_t line_end = head.find("\r\n");
  std::string_view request_line = head.substr(0, line_end);
  size_t sp1 = request_line.find(' ');
  size_t sp2 = sp1 == std::string_view::npos ? std::string_view::npos
                                             : request_line.find(' ', sp1 + 1);
  if (sp1 == std::string_view::npos || sp2 == std::string_view::npos) {
    error_status = 400;
    return std::nullopt;
  }
  auto method = parse_method(request_line.substr(0, sp1));
  if (!method) {
    error_status = 405;
    return std::nullopt;
  }
  std::string_view version = request_line.substr(sp2 + 1);
  if (!str::istarts_with(version, "HTTP/1.")) {
    error_status = 400;
    return std::nullopt;
  }

  HttpRequest req;
  req.method = *method;
  req.target = std::string(request_line.substr(sp1 + 1, sp2 - sp1 - 1));

  size_t pos = line_end == std::string_view::npos ? head.size() : line_end + 2;
  while (pos < head.size()) {
    size_t eol = head.find("\r\n", pos);
    if (eol == std::string_view::npos) eol = head.size();
    std::string_view line = head.substr(pos, eol - pos);
    pos = eol + 2;
    if (!line.empty() && (line.front() == ' ' || line.front() == '\t')) {
      error_status = 400; // obsolete line folding is rejected
      return std::nullopt;
    }
    size_t colon = line.find(':');
    if (colon == std::string_view::npos) {
      error_status = 400;
      return std::nullopt;
    }
    req.headers.emplace_back(std::string(str::trim(line.substr(0, colon))),
                             std::string(str::trim(line.substr(colon + 1))));
  }

  size_t want = 0;
  if (auto cl = req.header("Content-Length")) {
    for (char c : *cl) {
      if (c < '0' || c > '9') {
        error_status = 400;
        return std::nullopt;
      }
      want = want * 10 + static_cast<size_t>(c - '0');
      if (want > kMaxBodyBytes) {
        error_status = 413;
        return std::nullopt;
      }
    }
  } else if (req.header("Transfer-Encoding")) {
    error_status = 411; // chunked request bodies are out of scope
    return std::nullopt;
  }

  std::string body = buf.substr(header_end + 4);
  while (body.size() < want) {
    if (!recv_more(fd, body)) return std::nullopt;
  }
  body.resize(want);
  req.body = std::move(body);
  return req;
}

} // namespace

Server::Server(Handler handler, const std::string& host, std::uint16_t port)
    : handler_(std::move(handler)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) raise(ErrorCode::bind_error, "cannot create socket");

  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    raise(ErrorCode::bind_error, "bad bind address " + host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    int err = errno;
    ::close(listen_fd_);
    listen_fd_ = -1;
    raise(ErrorCode::bind_error,
          "bind " + host + ":" + std::to_string(port) + ": " + std::strerror(err));
  }
  if (::listen(listen_fd_, 64) != 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    raise(ErrorCode::bind_error, "listen failed");
  }

  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);

  accept_thread_ = std::thread([this] { accept_loop(); });
}

Server::~Server() { stop(); }

void Server::stop() {
  std::lock_guard stop_lock(stop_mutex_);
  if (stopped_) return;
  stopped_ = true;
  stopping_.store(true);
  if (listen_fd_ >= 0) {
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  if (accept_thread_.joinable()) accept_thread_.join();
  std::unique_lock lock(active_mutex_);
  active_cv_.wait_for(lock, std::chrono::seconds(30), [this] { return active_ == 0; });
}

void Server::accept_loop() {
  for (;;) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (stopping_.load() || (errno != EINTR && errno != ECONNABORTED)) return;
      continue;
    }
    {
      std::lock_guard lock(active_mutex_);
      ++active_;
    }
    std::thread([this, fd] {
      handle_connection(fd);
      std::lock_guard lock(active_mutex_);
      if (--active_ == 0) active_cv_.notify_all();
    }).detach();
  }
}

void Server::handle_connection(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));

  int error_status = 0;
  auto request = read_request(fd, error_status);
  if (!request) {
    if (error_status != 0) {
      HttpResponse err = make_response(error_status, "text/plain", "");
      send_all(fd, serialize_response(err));
    }
    ::close(fd);
    return;
  }

  HttpResponse resp;
  try {
    resp = handler_(*request);
  } catch (const std::exception& e) {
    resp = make_response(500, "text/plain", std::string("internal error: ") + e.what());
  } catch (...) {
    resp = make_response(500, "text/plain", "internal error");
  }
  send_all(fd, serialize_response(resp, request->method != Method::head));
  ::close(fd);
}

} // namespace ufu::http
