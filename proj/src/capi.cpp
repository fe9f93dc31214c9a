#include "ufuforge/ufu_forge.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "common/error.hpp"
#include "lab/lab.hpp"
#include "report/report.hpp"
#include "scanner/scanner.hpp"

using ufu::Error;
using ufu::ErrorCode;

struct ufu_lab {
  ufu::lab::LabServer server;
  explicit ufu_lab(ufu::lab::LabServerOptions options) : server(std::move(options)) {}
};

namespace {

ufu_status status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::no_file_part:
    case ErrorCode::dimension_out_of_range: return UFU_ERR_INVALID_ARGUMENT;
    case ErrorCode::bind_error: return UFU_ERR_BIND;
    case ErrorCode::connection_error: return UFU_ERR_CONNECTION;
    case ErrorCode::timeout: return UFU_ERR_TIMEOUT;
    case ErrorCode::boundary_collision:
    case ErrorCode::malformed_multipart:
    case ErrorCode::method_mismatch: return UFU_ERR_MALFORMED;
    case ErrorCode::target_unreachable: return UFU_ERR_UNREACHABLE;
    case ErrorCode::lab_startup_failure: return UFU_ERR_LAB_STARTUP;
    case ErrorCode::internal: return UFU_ERR_INTERNAL;
  }
  return UFU_ERR_INTERNAL;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) return nullptr;
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

template <typename Fn>
ufu_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return status_for(e.code());
  } catch (...) {
    return UFU_ERR_INTERNAL;
  }
}

std::chrono::milliseconds timeout_from_seconds(double seconds) {
  if (seconds <= 0) return std::chrono::milliseconds(300 * 1000);
  return std::chrono::milliseconds(static_cast<long long>(seconds * 1000.0));
}

} // namespace

extern "C" {

const char* ufu_status_name(ufu_status status) {
  switch (status) {
    case UFU_OK: return "ok";
    case UFU_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case UFU_ERR_BIND: return "bind_error";
    case UFU_ERR_CONNECTION: return "connection_error";
    case UFU_ERR_TIMEOUT: return "timeout";
    case UFU_ERR_MALFORMED: return "malformed";
    case UFU_ERR_UNREACHABLE: return "target_unreachable";
    case UFU_ERR_LAB_STARTUP: return "lab_startup_failure";
    case UFU_ERR_INTERNAL: return "internal_error";
  }
  return "unknown";
}

const char* ufu_version(void) { return "0.1.0"; }

void ufu_string_free(char* s) { std::free(s); }

ufu_status ufu_lab_start(const ufu_lab_options* options, ufu_lab** out_lab) {
  if (!out_lab) return UFU_ERR_INVALID_ARGUMENT;
  *out_lab = nullptr;
  return guarded([&]() -> ufu_status {
    ufu::lab::LabServerOptions server_options;
    if (options) {
      if (options->host) server_options.host = options->host;
      if (options->base_port < 0 || options->base_port > 65535) return UFU_ERR_INVALID_ARGUMENT;
      server_options.base_port = static_cast<std::uint16_t>(options->base_port);
      server_options.per_port = options->per_port_listeners != 0;
      if (options->response_delay_ms > 0) {
        server_options.response_delay = std::chrono::milliseconds(options->response_delay_ms);
      }
    }
    *out_lab = new ufu_lab(std::move(server_options));
    return UFU_OK;
  });
}

int ufu_lab_port(const ufu_lab* lab) { return lab ? lab->server.port() : -1; }

ufu_status ufu_lab_reset(ufu_lab* lab, int scenario_id) {
  if (!lab) return UFU_ERR_INVALID_ARGUMENT;
  return guarded([&]() -> ufu_status {
    lab->server.lab().reset(scenario_id);
    return UFU_OK;
  });
}

void ufu_lab_stop(ufu_lab* lab) {
  if (!lab) return;
  lab->server.stop();
  delete lab;
}

ufu_status ufu_scan_run(const ufu_scan_options* options, char** out_findings_jsonl) {
  if (!options || !options->url || !out_findings_jsonl) return UFU_ERR_INVALID_ARGUMENT;
  *out_findings_jsonl = nullptr;
  return guarded([&]() -> ufu_status {
    ufu::scanner::ScanConfig config;
    config.upload_url = options->url;
    if (options->field) config.form_field = options->field;
    if (options->uploads_hint) config.uploads_hint = options->uploads_hint;
    config.per_scenario_timeout = timeout_from_seconds(options->timeout_seconds);
    config.race_burst = options->race_burst < 0 ? 20 : options->race_burst;
    if (options->race_spacing_ms > 0) {
      config.race_spacing = std::chrono::milliseconds(options->race_spacing_ms);
    }
    if (options->has_seed) config.seed = options->seed;

    ufu::scanner::ScanResult result = ufu::scanner::scan(config);
    char* out = copy_string(ufu::report::findings_json_lines(result.findings));
    if (!out) return UFU_ERR_INTERNAL;
    *out_findings_jsonl = out;
    return UFU_OK;
  });
}

ufu_status ufu_eval_run(const ufu_eval_options* options, char** out_matrix_jsonl,
                        int* out_matches) {
  if (!out_matrix_jsonl) return UFU_ERR_INVALID_ARGUMENT;
  *out_matrix_jsonl = nullptr;
  if (out_matches) *out_matches = 0;
  return guarded([&]() -> ufu_status {
    ufu::report::EvalConfig config;
    if (options) {
      if (options->lab_url) config.lab_url = std::string(options->lab_url);
      config.per_scenario_timeout = timeout_from_seconds(options->timeout_seconds);
      config.race_burst = options->race_burst < 0 ? 20 : options->race_burst;
      if (options->race_spacing_ms > 0) {
        config.race_spacing = std::chrono::milliseconds(options->race_spacing_ms);
      }
      if (options->has_seed) config.seed = options->seed;
    }
    ufu::report::EvalOutcome outcome = ufu::report::run_eval(config);
    char* out = copy_string(ufu::report::render_json_lines(outcome.matrix));
    if (!out) return UFU_ERR_INTERNAL;
    *out_matrix_jsonl = out;
    if (out_matches) *out_matches = outcome.matches ? 1 : 0;
    return UFU_OK;
  });
}

ufu_status ufu_render_matrix(const char* matrix_jsonl, int format, char** out_rendered) {
  if (!matrix_jsonl || !out_rendered) return UFU_ERR_INVALID_ARGUMENT;
  *out_rendered = nullptr;
  if (format != 0 && format != 1) return UFU_ERR_INVALID_ARGUMENT;
  return guarded([&]() -> ufu_status {
    ufu::report::EvalMatrix matrix = ufu::report::parse_json_lines(matrix_jsonl);
    char* out = copy_string(ufu::report::render(
        matrix, format == 0 ? ufu::report::Format::table : ufu::report::Format::json_lines));
    if (!out) return UFU_ERR_INTERNAL;
    *out_rendered = out;
    return UFU_OK;
  });
}

} // extern "C"
