#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ufuforge/ufu_forge.h"

namespace {

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

std::string hex_to_printable(const std::string& hex) {
  std::string out;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  for (size_t i = 0; i + 1 < hex.size(); i += 2) {
    int hi = nibble(hex[i]);
    int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) return hex;
    char c = static_cast<char>((hi << 4) | lo);
    if (c >= 0x20 && c < 0x7F) {
      out.push_back(c);
    } else {
      char buf[5];
      std::snprintf(buf, sizeof(buf), "\\x%02X", static_cast<unsigned char>(c));
      out += buf;
    }
  }
  return out;
}

struct OwnedString {
  char* value = nullptr;
  ~OwnedString() { ufu_string_free(value); }
};

int run_serve(const std::string& host, int base_port, bool per_port) {
  ufu_lab_options options{host.c_str(), base_port, per_port ? 1 : 0, 0};
  ufu_lab* lab = nullptr;
  if (ufu_status rc = ufu_lab_start(&options, &lab); rc != UFU_OK) {
    std::cerr << "error: lab startup failed (" << ufu_status_name(rc) << ")\n";
    return 1;
  }
  int port = ufu_lab_port(lab);
  std::cout << "lab listening at http://" << host << ":" << port << "\n";
  std::cout << "scenarios: /s1/ .. /s15/, hardened control: /s0/\n";
  if (per_port) {
    std::cout << "per-scenario listeners: ports " << base_port + 1 << " .. " << base_port + 15
              << "\n";
  }
  std::cout << "press Ctrl-C to stop\n";
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  ufu_lab_stop(lab);
  return 0;
}

int run_scan(const std::string& url, const std::string& field, const std::string& hint,
             double timeout, int race_burst, int race_spacing_ms, bool json_output) {
  ufu_scan_options options{};
  options.url = url.c_str();
  options.field = field.c_str();
  options.uploads_hint = hint.c_str();
  options.timeout_seconds = timeout;
  options.race_burst = race_burst;
  options.race_spacing_ms = race_spacing_ms;

  OwnedString findings;
  ufu_status rc = ufu_scan_run(&options, &findings.value);
  if (rc != UFU_OK) {
    std::cerr << "error: scan failed (" << ufu_status_name(rc) << ")\n";
    return 1;
  }
  std::string jsonl = findings.value ? findings.value : "";
  if (json_output) {
    std::cout << jsonl;
  } else {
    size_t count = 0;
    size_t pos = 0;
    while (pos < jsonl.size()) {
      size_t eol = jsonl.find('\n', pos);
      std::string line = jsonl.substr(pos, eol == std::string::npos ? std::string::npos
                                                                    : eol - pos);
      pos = eol == std::string::npos ? jsonl.size() : eol + 1;
      if (line.empty()) continue;
      auto record = nlohmann::json::parse(line, nullptr, false);
      if (record.is_discarded()) continue;
      ++count;
      std::cout << "[" << record.value("verdict", "?") << "] technique="
                << record.value("technique", "?") << " url=" << record.value("proof_url", "?")
                << " status=" << record.value("status", 0)
                << " excerpt=" << hex_to_printable(record.value("excerpt_hex", "")) << "\n";
    }
    std::cout << count << " finding(s)\n";
  }
  return jsonl.empty() ? 2 : 0;
}

int run_eval(const std::string& lab_url, const std::string& format, const std::string& out_path,
             double timeout, int race_burst, int race_spacing_ms) {
  ufu_eval_options options{};
  options.lab_url = lab_url.empty() ? nullptr : lab_url.c_str();
  options.timeout_seconds = timeout;
  options.race_burst = race_burst;
  options.race_spacing_ms = race_spacing_ms;

  OwnedString matrix;
  int matches = 0;
  ufu_status rc = ufu_eval_run(&options, &matrix.value, &matches);
  if (rc != UFU_OK) {
    std::cerr << "error: eval failed (" << ufu_status_name(rc) << ")\n";
    return 2;
  }

  OwnedString rendered;
  int fmt = format == "json-lines" ? 1 : 0;
  if (ufu_render_matrix(matrix.value, fmt, &rendered.value) != UFU_OK || !rendered.value) {
    std::cerr << "error: render failed\n";
    return 2;
  }
  std::cout << rendered.value;

  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return 2;
    }
    out << matrix.value; // persist the JSON-lines form, whatever was displayed
  }
  if (!matches) {
    std::cerr << "capability matrix deviates from the reference pattern\n";
    return 1;
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"ufu-forge: unrestricted-file-upload scanner with an embedded scenario lab"};
  app.require_subcommand(1);

  auto* serve = app.add_subcommand("serve", "run the embedded lab as an HTTP server");
  std::string serve_host = "127.0.0.1";
  int base_port = 10000;
  bool per_port = false;
  serve->add_option("--host", serve_host, "bind address");
  serve->add_option("--base-port", base_port, "port of the path-prefix listener")
      ->check(CLI::Range(1, 65535));
  serve->add_flag("--per-port", per_port, "also bind one listener per scenario at base-port+N");

  auto* scan = app.add_subcommand("scan", "attack one upload endpoint and report findings");
  std::string scan_url;
  std::string scan_field = "fileToUpload";
  std::string scan_hint = "/uploads/";
  double scan_timeout = 300.0;
  int scan_race_burst = 20;
  int scan_race_spacing = 25;
  bool scan_json = false;
  scan->add_option("--url", scan_url, "upload endpoint URL")->required();
  scan->add_option("--field", scan_field, "file input field name");
  scan->add_option("--uploads-hint", scan_hint, "stored-file path hint");
  scan->add_option("--timeout", scan_timeout, "scan budget in seconds");
  scan->add_option("--race-burst", scan_race_burst, "race probes per attempt (0 disables)");
  scan->add_option("--race-spacing-ms", scan_race_spacing, "gap between race probes");
  scan->add_flag("--json-lines", scan_json, "emit raw JSON lines instead of text");

  auto* eval = app.add_subcommand(
      "eval", "score the scanner against all 15 scenarios (exit 0 iff S1-S14 exploited, S15 not)");
  std::string eval_lab_url;
  std::string eval_format = "table";
  std::string eval_out;
  double eval_timeout = 300.0;
  int eval_race_burst = 20;
  int eval_race_spacing = 25;
  eval->add_option("--lab-url", eval_lab_url, "existing lab base URL (default: embedded lab)");
  eval->add_option("--format", eval_format, "table or json-lines")
      ->check(CLI::IsMember({"table", "json-lines"}));
  eval->add_option("--out", eval_out, "persist the JSON-lines report to this path");
  eval->add_option("--timeout", eval_timeout, "per-scenario budget in seconds");
  eval->add_option("--race-burst", eval_race_burst, "race probes per attempt (0 disables)");
  eval->add_option("--race-spacing-ms", eval_race_spacing, "gap between race probes");

  CLI11_PARSE(app, argc, argv);

  if (serve->parsed()) return run_serve(serve_host, base_port, per_port);
  if (scan->parsed()) {
    return run_scan(scan_url, scan_field, scan_hint, scan_timeout, scan_race_burst,
                    scan_race_spacing, scan_json);
  }
  return run_eval(eval_lab_url, eval_format, eval_out, eval_timeout, eval_race_burst,
                  eval_race_spacing);
}
