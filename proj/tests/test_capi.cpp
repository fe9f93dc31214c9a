// Exercises the shared-library surface the CLI uses: opaque lab handle,
// scan and eval runs returning JSON lines, matrix rendering.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "ufuforge/ufu_forge.h"

namespace {

size_t count_lines(const char* s) {
  size_t n = 0;
  for (; s && *s; ++s) {
    if (*s == '\n') ++n;
  }
  return n;
}

} // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(ufu_status_name(UFU_OK)) == "ok");
  CHECK(std::string(ufu_status_name(UFU_ERR_BIND)) == "bind_error");
  CHECK(std::string(ufu_version()).find('.') != std::string::npos);
}

TEST_CASE("lab lifecycle: start, port, reset, stop") {
  ufu_lab_options options{"127.0.0.1", 0, 0, 0};
  ufu_lab* lab = nullptr;
  REQUIRE(ufu_lab_start(&options, &lab) == UFU_OK);
  REQUIRE(lab != nullptr);
  CHECK(ufu_lab_port(lab) > 0);
  CHECK(ufu_lab_reset(lab, 1) == UFU_OK);
  CHECK(ufu_lab_reset(lab, 0) == UFU_OK);
  CHECK(ufu_lab_reset(lab, 99) == UFU_ERR_INVALID_ARGUMENT);
  ufu_lab_stop(lab);
}

TEST_CASE("two labs on the same port: the second start reports bind failure") {
  ufu_lab_options first_options{"127.0.0.1", 0, 0, 0};
  ufu_lab* first = nullptr;
  REQUIRE(ufu_lab_start(&first_options, &first) == UFU_OK);
  ufu_lab_options second_options{"127.0.0.1", ufu_lab_port(first), 0, 0};
  ufu_lab* second = nullptr;
  CHECK(ufu_lab_start(&second_options, &second) == UFU_ERR_LAB_STARTUP);
  CHECK(second == nullptr);
  ufu_lab_stop(first);
}

TEST_CASE("scan via the C API returns findings as JSON lines") {
  ufu_lab_options options{"127.0.0.1", 0, 0, 0};
  ufu_lab* lab = nullptr;
  REQUIRE(ufu_lab_start(&options, &lab) == UFU_OK);
  std::string url = "http://127.0.0.1:" + std::to_string(ufu_lab_port(lab)) + "/s1/upload";

  ufu_scan_options scan_options{};
  scan_options.url = url.c_str();
  scan_options.timeout_seconds = 60;
  scan_options.race_burst = -1;      // default
  scan_options.race_spacing_ms = -1; // default
  scan_options.seed = 7;
  scan_options.has_seed = 1;

  char* findings = nullptr;
  REQUIRE(ufu_scan_run(&scan_options, &findings) == UFU_OK);
  REQUIRE(findings != nullptr);
  std::string jsonl = findings;
  ufu_string_free(findings);
  CHECK(count_lines(jsonl.c_str()) >= 3);
  CHECK(jsonl.find("\"verdict\":\"CE\"") != std::string::npos);
  CHECK(jsonl.find("\"verdict\":\"iFUB\"") != std::string::npos);
  CHECK(jsonl.find("\"verdict\":\"XSS\"") != std::string::npos);

  ufu_lab_stop(lab);
}

TEST_CASE("render matrix validates its inputs") {
  char* out = nullptr;
  CHECK(ufu_render_matrix(nullptr, 0, &out) == UFU_ERR_INVALID_ARGUMENT);
  CHECK(ufu_render_matrix("{bad json", 0, &out) == UFU_ERR_INVALID_ARGUMENT);
  CHECK(ufu_render_matrix("{}", 5, &out) == UFU_ERR_INVALID_ARGUMENT);

  std::string one_cell = "{\"aspect\":\"CE\",\"scenario\":\"S13\",\"cell\":\"not_applicable\"}\n";
  REQUIRE(ufu_render_matrix(one_cell.c_str(), 0, &out) == UFU_OK);
  std::string table = out;
  ufu_string_free(out);
  CHECK(table.find("S13") != std::string::npos);
  CHECK(table.find('-') != std::string::npos);

  out = nullptr;
  REQUIRE(ufu_render_matrix(one_cell.c_str(), 1, &out) == UFU_OK);
  std::string jsonl = out;
  ufu_string_free(out);
  CHECK(count_lines(jsonl.c_str()) == 45);
}

TEST_CASE("invalid scan options are rejected up front") {
  char* findings = nullptr;
  CHECK(ufu_scan_run(nullptr, &findings) == UFU_ERR_INVALID_ARGUMENT);
  ufu_scan_options scan_options{};
  CHECK(ufu_scan_run(&scan_options, &findings) == UFU_ERR_INVALID_ARGUMENT); // no url
  scan_options.url = "https://no-tls-support.test/upload";
  CHECK(ufu_scan_run(&scan_options, &findings) == UFU_ERR_INVALID_ARGUMENT);
}
