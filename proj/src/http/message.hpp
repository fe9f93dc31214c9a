#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ufu::http {

enum class Method { get, post, put, head };

const char* method_name(Method m);
std::optional<Method> parse_method(std::string_view token);

// Ordered (name, value) header list. Lookup is case-insensitive; original
// name casing and insertion order are preserved for serialization.
using Headers = std::vector<std::pair<std::string, std::string>>;

std::optional<std::string_view> find_header(const Headers& headers, std::string_view name);
void set_header(Headers& headers, std::string_view name, std::string value);

struct HttpRequest {
  Method method = Method::get;
  std::string target = "/"; // origin-form path plus optional query, raw bytes
  Headers headers;
  std::string body;

  std::optional<std::string_view> header(std::string_view name) const {
    return find_header(headers, name);
  }
  void set_header(std::string_view name, std::string value) {
    ufu::http::set_header(headers, name, std::move(value));
  }
};

struct HttpResponse {
  int status = 200;
  Headers headers;
  std::string body;

  std::optional<std::string_view> header(std::string_view name) const {
    return find_header(headers, name);
  }
  void set_header(std::string_view name, std::string value) {
    ufu::http::set_header(headers, name, std::move(value));
  }
};

HttpResponse make_response(int status, std::string content_type, std::string body);

const char* reason_phrase(int status);

// Wire form of a request, adding Host / Content-Length / Connection: close
// when the caller did not set them. Header order and casing are preserved.
std::string serialize_request(const HttpRequest& request, std::string_view host_header);

std::string serialize_response(const HttpResponse& response, bool include_body = true);

} // namespace ufu::http
