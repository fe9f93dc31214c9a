#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "http/multipart.hpp"

using namespace ufu;
using namespace ufu::http;

namespace {

// Generator for adversarial round-trip forms: binary content, filenames with
// NUL / "%00" / markup, optional declared types.
MultipartForm random_form(Rng& rng) {
  MultipartForm form;
  size_t part_count = 1 + rng.next() % 4;
  for (size_t i = 0; i < part_count; ++i) {
    FormPart part;
    part.name = rng.alnum(1 + rng.next() % 10);
    switch (rng.next() % 4) {
      case 0: break; // plain field
      case 1: part.filename = rng.alnum(8) + ".php"; break;
      case 2: {
        std::string name;
        size_t len = rng.next() % 32;
        for (size_t k = 0; k < len; ++k) {
          // any byte except CR/LF (those cannot survive a header line)
          char c;
          do {
            c = static_cast<char>(rng.next() % 256);
          } while (c == '\r' || c == '\n');
          name.push_back(c);
        }
        part.filename = name;
        break;
      }
      case 3: {
        static const char* hostile[] = {"file.php%00.png", "<img src=x onerror=alert(1)>.png",
                                        "../shell.php", "exploit.p.phphp"};
        std::string name = hostile[rng.next() % 4];
        if (rng.next() % 2) name.insert(name.size() / 2, 1, '\0');
        part.filename = name;
        break;
      }
    }
    if (rng.next() % 2) {
      part.declared_type = std::string(rng.next() % 2 ? "image/png" : "application/x-php");
    }
    size_t content_len = rng.next() % 64;
    for (size_t k = 0; k < content_len; ++k) {
      part.content.push_back(static_cast<char>(rng.next() % 256));
    }
    form.parts.push_back(std::move(part));
  }
  form.boundary = generate_boundary(rng, form.parts);
  return form;
}

} // namespace

TEST_CASE("single text field serializes to the exact grammar expansion") {
  MultipartForm form;
  form.boundary = "X";
  form.parts.push_back(FormPart{"submit", std::nullopt, std::nullopt, "Upload"});
  CHECK(serialize_multipart(form) ==
        "--X\r\nContent-Disposition: form-data; name=\"submit\"\r\n\r\nUpload\r\n--X--\r\n");
}

TEST_CASE("file part carries filename and declared type on its own lines") {
  MultipartForm form;
  form.boundary = "B0UND";
  form.parts.push_back(FormPart{"fileToUpload", "exploit.php", "image/png", "<?php ?>"});
  std::string wire = serialize_multipart(form);
  CHECK(wire.find("Content-Disposition: form-data; name=\"fileToUpload\"; "
                  "filename=\"exploit.php\"\r\n") != std::string::npos);
  CHECK(wire.find("Content-Type: image/png\r\n") != std::string::npos);
}

TEST_CASE("parse recovers the single text field") {
  std::string wire =
      "--X\r\nContent-Disposition: form-data; name=\"submit\"\r\n\r\nUpload\r\n--X--\r\n";
  MultipartForm form = parse_multipart(wire, "X");
  REQUIRE(form.parts.size() == 1);
  CHECK(form.parts[0].name == "submit");
  CHECK(form.parts[0].content == "Upload");
  CHECK_FALSE(form.parts[0].filename.has_value());
}

TEST_CASE("literal %00 in a filename survives parsing unmodified") {
  MultipartForm form;
  form.boundary = "Q";
  form.parts.push_back(FormPart{"f", "file.php%00.png", std::nullopt, "x"});
  MultipartForm back = parse_multipart(serialize_multipart(form), "Q");
  REQUIRE(back.parts.size() == 1);
  CHECK(back.parts[0].filename == "file.php%00.png");
}

TEST_CASE("raw NUL and markup bytes in filenames survive verbatim") {
  MultipartForm form;
  form.boundary = "Q";
  std::string nul_name = std::string("exploit.php") + '\0' + ".png";
  form.parts.push_back(FormPart{"a", nul_name, std::nullopt, "x"});
  form.parts.push_back(FormPart{"b", "<img src=x onerror=alert(1)>.png", std::nullopt, "y"});
  MultipartForm back = parse_multipart(serialize_multipart(form), "Q");
  REQUIRE(back.parts.size() == 2);
  CHECK(back.parts[0].filename == nul_name);
  CHECK(back.parts[1].filename == "<img src=x onerror=alert(1)>.png");
}

TEST_CASE("missing terminal boundary is malformed") {
  std::string wire = "--X\r\nContent-Disposition: form-data; name=\"submit\"\r\n\r\nUpload\r\n";
  CHECK_THROWS_AS(parse_multipart(wire, "X"), Error);
  try {
    parse_multipart(wire, "X");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::malformed_multipart);
  }
}

TEST_CASE("part without Content-Disposition name is malformed") {
  std::string wire = "--X\r\nContent-Type: text/plain\r\n\r\nUpload\r\n--X--\r\n";
  CHECK_THROWS_AS(parse_multipart(wire, "X"), Error);
}

TEST_CASE("folded header lines are rejected") {
  std::string wire =
      "--X\r\nContent-Disposition: form-data;\r\n name=\"submit\"\r\n\r\nUpload\r\n--X--\r\n";
  CHECK_THROWS_AS(parse_multipart(wire, "X"), Error);
}

TEST_CASE("unknown part headers are ignored") {
  std::string wire =
      "--X\r\nContent-Disposition: form-data; name=\"f\"\r\nX-Whatever: 1\r\n\r\nhi\r\n--X--\r\n";
  MultipartForm form = parse_multipart(wire, "X");
  REQUIRE(form.parts.size() == 1);
  CHECK(form.parts[0].content == "hi");
}

TEST_CASE("boundary occurring in content raises BoundaryCollision") {
  MultipartForm form;
  form.boundary = "XYZ";
  form.parts.push_back(FormPart{"f", std::nullopt, std::nullopt, "aaXYZbb"});
  try {
    serialize_multipart(form);
    FAIL("expected boundary_collision");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::boundary_collision);
  }
}

TEST_CASE("serialization is deterministic") {
  MultipartForm form;
  form.boundary = "d3t3rm1n1sm";
  form.parts.push_back(FormPart{"f", "a.php", "text/plain", "body"});
  CHECK(serialize_multipart(form) == serialize_multipart(form));
}

TEST_CASE("round-trip: 1000 randomized forms with binary payloads are identity") {
  Rng rng(20240717);
  for (int i = 0; i < 1000; ++i) {
    MultipartForm form = random_form(rng);
    std::string wire = serialize_multipart(form);
    MultipartForm back = parse_multipart(wire, form.boundary);
    CHECK(back == form);
  }
}

TEST_CASE("boundary extraction from a Content-Type header value") {
  auto b = boundary_from_content_type("multipart/form-data; boundary=abcDEF123");
  REQUIRE(b.has_value());
  CHECK(*b == "abcDEF123");
  CHECK(boundary_from_content_type("multipart/form-data; boundary=\"quoted\"") == "quoted");
  CHECK_FALSE(boundary_from_content_type("application/x-www-form-urlencoded").has_value());
  CHECK_FALSE(boundary_from_content_type("multipart/form-data").has_value());
}

TEST_CASE("generated boundaries avoid colliding with contents") {
  Rng rng(7);
  std::vector<FormPart> parts;
  parts.push_back(FormPart{"f", std::nullopt, std::nullopt, "some content"});
  std::string boundary = generate_boundary(rng, parts);
  CHECK(boundary.size() == 24);
  CHECK(parts[0].content.find(boundary) == std::string::npos);
}
