#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "http/message.hpp"
#include "http/server.hpp"
#include "lab/scenario.hpp"
#include "lab/vfs.hpp"

namespace ufu::lab {

enum class ImageCheckMode { magic_only, dimensions };

struct ImageCheck {
  bool accepted = false;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
};

// magic_only accepts any content starting with a known image signature
// (GIF87a/GIF89a, PNG, JPEG SOI). dimensions additionally walks the container
// structure (PNG chunk chain with CRCs, GIF block chain) and reports the
// declared size; anything that does not parse is rejected.
ImageCheck check_image(std::string_view bytes, ImageCheckMode mode);

// Extensions granted execution by an uploaded `.htaccess` in `dir`
// (`AddType application/x-httpd-php <ext>` lines; anything else is inert).
// Re-evaluated on every fetch so uploads take effect immediately.
std::vector<std::string> htaccess_extensions(const VirtualFs& fs, std::string_view dir);

// Interpreter routing for a stored path. Disabled path prefixes win over
// everything, including .htaccess overrides; then infix execution, the static
// extension set, and finally (when enabled) the directory's .htaccess grants.
bool should_execute(const ScenarioSpec& spec, const VirtualFs& fs, std::string_view path);

struct AccessEntry {
  std::int64_t timestamp_us = 0; // response-completion time, relative to lab start
  std::string method;
  std::string path;
  int status = 0;
};

struct LabOptions {
  std::chrono::milliseconds response_delay{0}; // test hook: slows every response
};

// Deterministic reimplementation of the 15 upload scenarios plus a hardened
// control (id 0). Each scenario owns a virtual filesystem and an access log;
// execution is emulated through interpret(), never real.
class Lab {
public:
  static constexpr int scenario_count = 15;

  explicit Lab(LabOptions options = {});

  // Routes /sN/<rest> targets. "/" serves an index page.
  http::HttpResponse handle(const http::HttpRequest& request);

  // Scenario-relative entry point; link_prefix ("" or "/sN") is prepended to
  // anchor hrefs so pages work both path-prefixed and per-port.
  http::HttpResponse handle_scenario(int scenario_id, const http::HttpRequest& request,
                                     std::string_view relative_target,
                                     std::string_view link_prefix);

  void reset(int scenario_id);

  const ScenarioSpec& spec(int scenario_id) const;
  bool fs_contains(int scenario_id, std::string_view path) const;
  std::vector<std::string> stored_paths(int scenario_id) const;
  std::vector<AccessEntry> access_log(int scenario_id) const;

private:
  struct ScenarioState {
    ScenarioSpec spec;
    VirtualFs fs;
    mutable std::mutex log_mutex;
    std::vector<AccessEntry> log;
  };

  ScenarioState& state(int scenario_id);
  const ScenarioState& state(int scenario_id) const;
  std::int64_t now_us() const;

  http::HttpResponse route(ScenarioState& st, const http::HttpRequest& request,
                           std::string_view rel, std::string_view link_prefix);
  http::HttpResponse handle_upload(ScenarioState& st, const http::HttpRequest& request,
                                   std::string_view link_prefix);
  http::HttpResponse handle_put(ScenarioState& st, const http::HttpRequest& request,
                                std::string_view rel, std::string_view link_prefix);
  http::HttpResponse handle_fetch(ScenarioState& st, std::string_view rel);
  http::HttpResponse form_page(const ScenarioState& st) const;

  LabOptions options_;
  std::chrono::steady_clock::time_point start_;
  // index 0 = hardened control, 1..15 = scenarios
  std::vector<std::unique_ptr<ScenarioState>> states_;
};

struct LabServerOptions {
  std::string host = "127.0.0.1";
  std::uint16_t base_port = 0; // 0 picks an ephemeral port
  bool per_port = false;       // additionally bind base_port + N per scenario
  std::chrono::milliseconds response_delay{0};
};

// Lab bound to listeners: a path-prefix router on base_port and, optionally,
// one listener per scenario at base_port + N (the classic layout).
class LabServer {
public:
  explicit LabServer(LabServerOptions options = {});

  Lab& lab() { return lab_; }
  std::uint16_t port() const { return prefix_server_->port(); }
  std::string base_url() const;
  void stop();

private:
  LabServerOptions options_;
  Lab lab_;
  std::unique_ptr<http::Server> prefix_server_;
  std::vector<std::unique_ptr<http::Server>> per_port_servers_;
};

} // namespace ufu::lab
