#include "http/message.hpp"

#include "common/strings.hpp"

namespace ufu::http {

const char* method_name(Method m) {
  switch (m) {
    case Method::get: return "GET";
    case Method::post: return "POST";
    case Method::put: return "PUT";
    case Method::head: return "HEAD";
  }
  return "GET";
}

std::optional<Method> parse_method(std::string_view token) {
  if (token == "GET") return Method::get;
  if (token == "POST") return Method::post;
  if (token == "PUT") return Method::put;
  if (token == "HEAD") return Method::head;
  return std::nullopt;
}

std::optional<std::string_view> find_header(const Headers& headers, std::string_view name) {
  for (const auto& [key, value] : headers) {
    if (str::iequals(key, name)) return std::string_view(value);
  }
  return std::nullopt;
}

void set_header(Headers& headers, std::string_view name, std::string value) {
  for (auto& [key, existing] : headers) {
    if (str::iequals(key, name)) {
      existing = std::move(value);
      return;
    }
  }
  headers.emplace_back(std::string(name), std::move(value));
}

HttpResponse make_response(int status, std::string content_type, std::string body) {
  HttpResponse resp;
  resp.status = status;
  resp.set_header("Content-Type", std::move(content_type));
  resp.body = std::move(body);
  return resp;
}

const char* reason_phrase(int status) {
  switch (status) {
    case 200: return "OK";
    case 201: return "Created";
    case 204: return "No Content";
    case 302: return "Found";
    case 400: return "Bad Request";
    case 403: return "Forbidden";
    case 404: return "Not Found";
    case 405: return "Method Not Allowed";
    case 408: return "Request Timeout";
    case 411: return "Length Required";
    case 413: return "Payload Too Large";
    case 500: return "Internal Server Error";
    default: return "Status";
  }
}

std::string serialize_request(const HttpRequest& request, std::string_view host_header) {
  std::string out;
  out += method_name(request.method);
  out += ' ';
  out += request.target.empty() ? std::string("/") : request.target;
  out += " HTTP/1.1\r\n";
  if (!request.header("Host")) {
    out += "Host: ";
    out += host_header;
    out += "\r\n";
  }
  for (const auto& [name, value] : request.headers) {
    out += name;
    out += ": ";
    out += value;
    out += "\r\n";
  }
  bool needs_length = !request.body.empty() || request.method == Method::post ||
                      request.method == Method::put;
  if (needs_length && !request.header("Content-Length")) {
    out += "Content-Length: " + std::to_string(request.body.size()) + "\r\n";
  }
  if (!request.header("Connection")) {
    out += "Connection: close\r\n";
  }
  out += "\r\n";
  out += request.body;
  return out;
}

std::string serialize_response(const HttpResponse& response, bool include_body) {
  std::string out = "HTTP/1.1 " + std::to_string(response.status) + " " +
                    reason_phrase(response.status) + "\r\n";
  for (const auto& [name, value] : response.headers) {
    out += name;
    out += ": ";
    out += value;
    out += "\r\n";
  }
  if (!response.header("Content-Length")) {
    out += "Content-Length: " + std::to_string(response.body.size()) + "\r\n";
  }
  if (!response.header("Connection")) {
    out += "Connection: close\r\n";
  }
  out += "\r\n";
  if (include_body) out += response.body;
  return out;
}

} // namespace ufu::http
