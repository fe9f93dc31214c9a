#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <chrono>
#include <future>
#include <thread>
#include <vector>

#include "common/error.hpp"
#include "http/client.hpp"
#include "http/message.hpp"
#include "http/server.hpp"

using namespace ufu;
using namespace ufu::http;
using namespace std::chrono_literals;

namespace {

HttpResponse echo_handler(const HttpRequest& req) {
  HttpResponse resp;
  resp.status = 200;
  resp.set_header("Content-Type", "text/plain");
  resp.body = std::string(method_name(req.method)) + " " + req.target + "\n" + req.body;
  return resp;
}

} // namespace

TEST_CASE("request serialization adds Host, Content-Length and Connection") {
  HttpRequest req;
  req.method = Method::post;
  req.target = "/upload";
  req.set_header("X-CaSeD-Header", "kept");
  req.body = "12345";
  std::string wire = serialize_request(req, "localhost:8080");
  CHECK(wire.find("POST /upload HTTP/1.1\r\n") == 0);
  CHECK(wire.find("Host: localhost:8080\r\n") != std::string::npos);
  CHECK(wire.find("Content-Length: 5\r\n") != std::string::npos);
  CHECK(wire.find("Connection: close\r\n") != std::string::npos);
  CHECK(wire.find("X-CaSeD-Header: kept\r\n") != std::string::npos); // casing preserved
}

TEST_CASE("header lookup is case-insensitive") {
  HttpRequest req;
  req.set_header("Content-TYPE", "text/plain");
  auto v = req.header("content-type");
  REQUIRE(v.has_value());
  CHECK(*v == "text/plain");
}

TEST_CASE("URL parsing") {
  ParsedUrl u = parse_url("http://127.0.0.1:8080/s1/upload?x=1");
  CHECK(u.endpoint.host == "127.0.0.1");
  CHECK(u.endpoint.port == 8080);
  CHECK(u.target == "/s1/upload?x=1");

  ParsedUrl bare = parse_url("http://example.test");
  CHECK(bare.endpoint.port == 80);
  CHECK(bare.target == "/");

  CHECK_THROWS_AS(parse_url("https://example.test/"), Error);
  CHECK_THROWS_AS(parse_url("ftp://example.test/"), Error);
}

TEST_CASE("roundtrip against a live server") {
  Server server(echo_handler, "127.0.0.1", 0);
  Endpoint ep{"127.0.0.1", server.port()};

  HttpRequest req;
  req.method = Method::get;
  req.target = "/hello";
  HttpResponse resp = http_roundtrip(ep, req, 5s);
  CHECK(resp.status == 200);
  CHECK(resp.body == "GET /hello\n");

  SUBCASE("POST body is delivered intact") {
    HttpRequest post;
    post.method = Method::post;
    post.target = "/data";
    post.body = std::string("a\0b\r\nbinary", 11);
    HttpResponse r = http_roundtrip(ep, post, 5s);
    CHECK(r.body == "POST /data\n" + post.body);
  }
  server.stop();
}

TEST_CASE("binding the same port twice raises BindError") {
  Server first(echo_handler, "127.0.0.1", 0);
  try {
    Server second(echo_handler, "127.0.0.1", first.port());
    FAIL("expected bind_error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::bind_error);
  }
  first.stop();
}

TEST_CASE("connecting to a closed port raises ConnectionError") {
  std::uint16_t dead_port;
  {
    Server probe(echo_handler, "127.0.0.1", 0);
    dead_port = probe.port();
    probe.stop();
  }
  HttpRequest req;
  req.target = "/";
  try {
    http_roundtrip(Endpoint{"127.0.0.1", dead_port}, req, 2s);
    FAIL("expected connection_error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::connection_error);
  }
}

TEST_CASE("deadline on a stalling handler raises Timeout") {
  Server slow(
      [](const HttpRequest&) {
        std::this_thread::sleep_for(2s);
        return make_response(200, "text/plain", "late");
      },
      "127.0.0.1", 0);
  HttpRequest req;
  req.target = "/";
  try {
    http_roundtrip(Endpoint{"127.0.0.1", slow.port()}, req, 200ms);
    FAIL("expected timeout");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::timeout);
  }
  slow.stop();
}

TEST_CASE("two in-flight requests complete concurrently") {
  std::atomic<int> in_flight{0};
  std::atomic<int> peak{0};
  Server server(
      [&](const HttpRequest&) {
        int now = ++in_flight;
        int seen = peak.load();
        while (now > seen && !peak.compare_exchange_weak(seen, now)) {
        }
        std::this_thread::sleep_for(300ms);
        --in_flight;
        return make_response(200, "text/plain", "ok");
      },
      "127.0.0.1", 0);
  Endpoint ep{"127.0.0.1", server.port()};

  auto call = [&] {
    HttpRequest req;
    req.target = "/";
    return http_roundtrip(ep, req, 5s).status;
  };
  auto f1 = std::async(std::launch::async, call);
  auto f2 = std::async(std::launch::async, call);
  CHECK(f1.get() == 200);
  CHECK(f2.get() == 200);
  CHECK(peak.load() >= 2);
  server.stop();
}

TEST_CASE("eight concurrent connections each get their own response") {
  Server server(echo_handler, "127.0.0.1", 0);
  Endpoint ep{"127.0.0.1", server.port()};
  std::vector<std::future<bool>> futures;
  for (int i = 0; i < 8; ++i) {
    futures.push_back(std::async(std::launch::async, [&, i] {
      HttpRequest req;
      req.method = Method::post;
      req.target = "/slot/" + std::to_string(i);
      req.body = std::string(1000 + i, static_cast<char>('a' + i));
      HttpResponse resp = http_roundtrip(ep, req, 10s);
      return resp.body == "POST /slot/" + std::to_string(i) + "\n" + req.body;
    }));
  }
  for (auto& f : futures) CHECK(f.get());
  server.stop();
}

TEST_CASE("after shutdown the port refuses connections") {
  std::uint16_t port;
  {
    Server server(echo_handler, "127.0.0.1", 0);
    port = server.port();
    server.stop();
  }
  HttpRequest req;
  req.target = "/";
  CHECK_THROWS_AS(http_roundtrip(Endpoint{"127.0.0.1", port}, req, 2s), Error);
}

TEST_CASE("raw byte targets pass through the server untouched") {
  std::string seen;
  Server server(
      [&](const HttpRequest& req) {
        seen = req.target;
        return make_response(200, "text/plain", "ok");
      },
      "127.0.0.1", 0);
  HttpRequest req;
  req.target = "/uploads/%3Cimg%20src%3Dx%3E.png";
  (void)http_roundtrip(Endpoint{"127.0.0.1", server.port()}, req, 5s);
  CHECK(seen == "/uploads/%3Cimg%20src%3Dx%3E.png");
  server.stop();
}
