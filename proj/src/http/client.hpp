#pragma once

#include <chrono>
#include <cstdint>
#include <string>

#include "http/message.hpp"

namespace ufu::http {

struct Endpoint {
  std::string host;
  std::uint16_t port = 80;

  std::string authority() const { return host + ":" + std::to_string(port); }
};

struct ParsedUrl {
  Endpoint endpoint;
  std::string target; // path + optional query, "/" when absent
};

// Accepts http:// URLs only; anything else is ErrorCode::invalid_argument.
ParsedUrl parse_url(std::string_view url);

// One HTTP/1.1 exchange over a fresh TCP connection. Connections are never
// reused, so concurrent calls are independent at the transport level.
// Throws ErrorCode::timeout when the deadline elapses and
// ErrorCode::connection_error for refused/reset/garbled exchanges.
HttpResponse http_roundtrip(const Endpoint& endpoint, const HttpRequest& request,
                            std::chrono::milliseconds deadline);

} // namespace ufu::http
