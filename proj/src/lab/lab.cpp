#include "lab/lab.hpp"

#include <zlib.h>

#include <thread>

#include "common/error.hpp"
#include "common/strings.hpp"
#include "http/multipart.hpp"
#include "lab/interpret.hpp"
#include "payloads/image.hpp"

namespace ufu::lab {

namespace {

constexpr std::string_view reject_marker = "FUEL-REJECTED: ";
constexpr std::string_view stored_marker = "FUEL-STORED: ";

std::uint32_t be32(std::string_view s, size_t off) {
  return (static_cast<std::uint32_t>(static_cast<unsigned char>(s[off])) << 24) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + 1])) << 16) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + 2])) << 8) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + 3]));
}

std::uint32_t le16(std::string_view s, size_t off) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(s[off])) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + 1])) << 8);
}

ImageCheck check_png_dimensions(std::string_view bytes) {
  const auto sig = payloads::png_signature();
  ImageCheck out;
  size_t pos = sig.size();
  bool first = true;
  bool saw_end = false;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  while (pos + 12 <= bytes.size()) {
    std::uint32_t length = be32(bytes, pos);
    if (length > bytes.size() || pos + 12 + length > bytes.size()) return out;
    std::string_view type = bytes.substr(pos + 4, 4);
    std::string_view data = bytes.substr(pos + 8, length);
    std::uint32_t expected = be32(bytes, pos + 8 + length);
    auto crc = ::crc32(0L, reinterpret_cast<const Bytef*>(bytes.data() + pos + 4),
                       static_cast<uInt>(4 + length));
    if (static_cast<std::uint32_t>(crc) != expected) return out;
    if (first) {
      if (type != "IHDR" || length != 13) return out;
      width = be32(data, 0);
      height = be32(data, 4);
      first = false;
    }
    pos += 12 + length;
    if (type == "IEND") {
      saw_end = true;
      break;
    }
  }
  if (first || !saw_end || width < 1 || height < 1) return out;
  return ImageCheck{true, width, height};
}

ImageCheck check_gif_dimensions(std::string_view bytes) {
  ImageCheck out;
  if (bytes.size() < 13) return out;
  std::uint32_t width = le16(bytes, 6);
  std::uint32_t height = le16(bytes, 8);
  unsigned char packed = static_cast<unsigned char>(bytes[10]);
  size_t pos = 13;
  if (packed & 0x80) {
    size_t table = size_t{3} * (size_t{2} << (packed & 0x07));
    pos += table;
  }
  // walk extension and image blocks to the trailer
  bool saw_trailer = false;
  while (pos < bytes.size()) {
    unsigned char introducer = static_cast<unsigned char>(bytes[pos]);
    if (introducer == 0x3B) {
      saw_trailer = true;
      break;
    }
    if (introducer == 0x21) { // extension: label + data sub-blocks
      pos += 2;
      for (;;) {
        if (pos >= bytes.size()) return out;
        unsigned char block = static_cast<unsigned char>(bytes[pos]);
        pos += 1 + block;
        if (block == 0) break;
      }
    } else if (introducer == 0x2C) { // image descriptor
      if (pos + 10 > bytes.size()) return out;
      unsigned char local = static_cast<unsigned char>(bytes[pos + 9]);
      pos += 10;
      if (local & 0x80) pos += size_t{3} * (size_t{2} << (local & 0x07));
      pos += 1; // LZW minimum code size
      for (;;) {
        if (pos >= bytes.size()) return out;
        unsigned char block = static_cast<unsigned char>(bytes[pos]);
        pos += 1 + block;
        if (block == 0) break;
      }
    } else {
      return out;
    }
  }
  if (!saw_trailer || width < 1 || height < 1) return out;
  return ImageCheck{true, width, height};
}

bool name_matches_extension(std::string_view name, std::string_view ext, bool case_sensitive,
                            bool infix) {
  if (infix) {
    return case_sensitive ? name.find(ext) != std::string_view::npos
                          : str::icontains(name, ext);
  }
  if (name.size() < ext.size()) return false;
  std::string_view tail = name.substr(name.size() - ext.size());
  return case_sensitive ? tail == ext : str::iequals(tail, ext);
}

// First failing validator, or nullopt when the chain accepts.
std::optional<ValidatorKind> run_validators(const ScenarioSpec& spec, std::string_view filename,
                                            std::string_view declared_type,
                                            std::string_view content) {
  for (const auto& v : spec.validators) {
    switch (v.kind) {
      case ValidatorKind::client_side_only:
      case ValidatorKind::extension_strip_once:
        break; // nothing rejected server-side
      case ValidatorKind::mime_header_check: {
        if (declared_type.empty()) return v.kind;
        if (str::icontains(declared_type, "php")) return v.kind;
        if (!str::istarts_with(declared_type, "image/") &&
            !str::iequals(str::trim(declared_type), "text/plain")) {
          return v.kind;
        }
        break;
      }
      case ValidatorKind::extension_denylist: {
        for (const auto& ext : v.extensions) {
          if (name_matches_extension(filename, ext, v.case_sensitive, v.infix)) return v.kind;
        }
        break;
      }
      case ValidatorKind::extension_allowlist: {
        bool ok = false;
        for (const auto& ext : v.extensions) {
          if (name_matches_extension(filename, ext, /*case_sensitive=*/false, /*infix=*/false)) {
            ok = true;
            break;
          }
        }
        if (!ok) return v.kind;
        break;
      }
      case ValidatorKind::magic_number_check:
        if (!check_image(content, ImageCheckMode::magic_only).accepted) return v.kind;
        break;
      case ValidatorKind::image_dimension_check:
        if (!check_image(content, ImageCheckMode::dimensions).accepted) return v.kind;
        break;
      case ValidatorKind::size_limit:
        if (content.size() > v.max_bytes) return v.kind;
        break;
    }
  }
  return std::nullopt;
}

std::string stored_name(const StoragePolicy& policy, std::string_view filename) {
  std::string name(filename);
  if (policy.truncate_at_nul) {
    size_t raw = name.find('\0');
    size_t literal = name.find("%00");
    size_t cut = std::min(raw, literal);
    if (cut != std::string::npos) name.resize(cut);
  }
  if (policy.strip_extension_once) {
    name = strip_once(name, *policy.strip_extension_once);
  }
  return name;
}

std::string content_type_for(const ScenarioSpec& spec, std::string_view path) {
  if (spec.force_octet_stream) return "application/octet-stream";
  std::string_view name = str::basename(path);
  if (str::iends_with(name, ".html") || str::iends_with(name, ".htm")) return "text/html";
  if (str::iends_with(name, ".png")) return "image/png";
  if (str::iends_with(name, ".gif")) return "image/gif";
  return "application/octet-stream";
}

std::string page(std::string body_inner) {
  return "<html><body>\n" + std::move(body_inner) + "</body></html>\n";
}

} // namespace

ImageCheck check_image(std::string_view bytes, ImageCheckMode mode) {
  const auto png = payloads::png_signature();
  bool is_png = bytes.substr(0, png.size()) == png;
  bool is_gif = bytes.substr(0, 6) == "GIF87a" || bytes.substr(0, 6) == "GIF89a";
  bool is_jpeg = bytes.substr(0, 2) == payloads::jpeg_soi();
  if (mode == ImageCheckMode::magic_only) {
    return ImageCheck{is_png || is_gif || is_jpeg, 0, 0};
  }
  if (is_png) return check_png_dimensions(bytes);
  if (is_gif) return check_gif_dimensions(bytes);
  return ImageCheck{}; // JPEG carries no parseable descriptor here
}

bool should_execute(const ScenarioSpec& spec, const VirtualFs& fs, std::string_view path) {
  for (const auto& prefix : spec.interpreter.disabled_paths) {
    if (path.substr(0, prefix.size()) == prefix) return false;
  }
  std::string_view name = str::basename(path);
  if (spec.interpreter.infix_execution && str::icontains(name, ".php")) return true;
  for (const auto& ext : spec.interpreter.executable_extensions) {
    if (str::iends_with(name, ext)) return true;
  }
  if (spec.htaccess_enabled) {
    for (const auto& ext : htaccess_extensions(fs, str::dirname(path))) {
      if (str::iends_with(name, ext)) return true;
    }
  }
  return false;
}

std::vector<std::string> htaccess_extensions(const VirtualFs& fs, std::string_view dir) {
  std::vector<std::string> out;
  auto file = fs.get(std::string(dir) + ".htaccess");
  if (!file) return out;
  std::string_view rest = file->bytes;
  while (!rest.empty()) {
    size_t eol = rest.find('\n');
    std::string_view line = eol == std::string_view::npos ? rest : rest.substr(0, eol);
    rest = eol == std::string_view::npos ? std::string_view{} : rest.substr(eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    line = str::trim(line);

    // AddType application/x-httpd-php .ext
    std::vector<std::string_view> tokens;
    size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
      size_t end = pos;
      while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
      if (end > pos) tokens.push_back(line.substr(pos, end - pos));
      pos = end;
    }
    if (tokens.size() == 3 && tokens[0] == "AddType" &&
        tokens[1] == "application/x-httpd-php" && tokens[2].size() > 1 &&
        tokens[2].front() == '.') {
      out.push_back(str::to_lower(tokens[2]));
    }
  }
  return out;
}

Lab::Lab(LabOptions options) : options_(options), start_(std::chrono::steady_clock::now()) {
  states_.push_back(std::make_unique<ScenarioState>());
  states_.back()->spec = hardened_scenario();
  for (auto& spec : default_scenarios()) {
    states_.push_back(std::make_unique<ScenarioState>());
    states_.back()->spec = std::move(spec);
  }
}

std::int64_t Lab::now_us() const {
  return std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() -
                                                               start_)
      .count();
}

Lab::ScenarioState& Lab::state(int scenario_id) {
  if (scenario_id < 0 || scenario_id > scenario_count) {
    raise(ErrorCode::invalid_argument, "scenario id out of range");
  }
  return *states_[static_cast<size_t>(scenario_id)];
}

const Lab::ScenarioState& Lab::state(int scenario_id) const {
  if (scenario_id < 0 || scenario_id > scenario_count) {
    raise(ErrorCode::invalid_argument, "scenario id out of range");
  }
  return *states_[static_cast<size_t>(scenario_id)];
}

const ScenarioSpec& Lab::spec(int scenario_id) const { return state(scenario_id).spec; }

bool Lab::fs_contains(int scenario_id, std::string_view path) const {
  return state(scenario_id).fs.contains(path);
}

std::vector<std::string> Lab::stored_paths(int scenario_id) const {
  return state(scenario_id).fs.paths();
}

std::vector<AccessEntry> Lab::access_log(int scenario_id) const {
  const auto& st = state(scenario_id);
  std::lock_guard lock(st.log_mutex);
  return st.log;
}

void Lab::reset(int scenario_id) {
  auto& st = state(scenario_id);
  st.fs.clear();
  std::lock_guard lock(st.log_mutex);
  st.log.clear();
}

http::HttpResponse Lab::handle(const http::HttpRequest& request) {
  std::string_view path = request.target;
  if (size_t q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);

  if (path == "/" || path.empty()) {
    if (options_.response_delay.count() > 0) std::this_thread::sleep_for(options_.response_delay);
    std::string body = "<h1>ufu-forge lab</h1>\n<ul>\n";
    for (int n = 0; n <= scenario_count; ++n) {
      body += "<li><a href=\"/s" + std::to_string(n) + "/\">s" + std::to_string(n) + ": " +
              str::html_escape(state(n).spec.title) + "</a></li>\n";
    }
    body += "</ul>\n";
    return http::make_response(200, "text/html", page(std::move(body)));
  }

  if (path.size() >= 2 && path[0] == '/' && path[1] == 's') {
    size_t digits_end = 2;
    while (digits_end < path.size() && path[digits_end] >= '0' && path[digits_end] <= '9') {
      ++digits_end;
    }
    if (digits_end > 2 && (digits_end == path.size() || path[digits_end] == '/')) {
      int id = 0;
      for (size_t i = 2; i < digits_end; ++i) id = id * 10 + (path[i] - '0');
      if (id >= 0 && id <= scenario_count) {
        std::string_view rel = digits_end == path.size() ? "/" : path.substr(digits_end);
        std::string prefix = "/s" + std::to_string(id);
        return handle_scenario(id, request, rel, prefix);
      }
    }
  }
  return http::make_response(404, "text/plain", "no such scenario\n");
}

http::HttpResponse Lab::handle_scenario(int scenario_id, const http::HttpRequest& request,
                                        std::string_view relative_target,
                                        std::string_view link_prefix) {
  auto& st = state(scenario_id);
  std::string_view rel = relative_target;
  if (size_t q = rel.find('?'); q != std::string_view::npos) rel = rel.substr(0, q);

  http::HttpResponse resp = route(st, request, rel, link_prefix);
  if (options_.response_delay.count() > 0) std::this_thread::sleep_for(options_.response_delay);
  {
    std::lock_guard lock(st.log_mutex);
    st.log.push_back(AccessEntry{now_us(), http::method_name(request.method), std::string(rel),
                                 resp.status});
  }
  return resp;
}

http::HttpResponse Lab::route(ScenarioState& st, const http::HttpRequest& request,
                              std::string_view rel, std::string_view link_prefix) {
  using http::Method;

  if (rel == "/__log") {
    std::string body;
    std::lock_guard lock(st.log_mutex);
    for (const auto& entry : st.log) {
      body += std::to_string(entry.timestamp_us) + " " + entry.method + " " + entry.path + " " +
              std::to_string(entry.status) + "\n";
    }
    return http::make_response(200, "text/plain", std::move(body));
  }
  if (rel == "/reset") {
    if (request.method != Method::post) {
      return http::make_response(405, "text/plain", "reset wants POST\n");
    }
    st.fs.clear();
    {
      std::lock_guard lock(st.log_mutex);
      st.log.clear();
    }
    return http::make_response(200, "text/plain", "reset\n");
  }

  if (request.method == Method::put) {
    return handle_put(st, request, rel, link_prefix);
  }
  if (rel == "/upload") {
    if (request.method == Method::post) return handle_upload(st, request, link_prefix);
    if (request.method == Method::get || request.method == Method::head) return form_page(st);
    return http::make_response(405, "text/plain", "unsupported method\n");
  }
  if (rel == "/" || rel.empty()) {
    if (request.method == Method::post && st.spec.upload_method == UploadMethod::post_multipart) {
      return handle_upload(st, request, link_prefix);
    }
    return form_page(st);
  }
  if (request.method == Method::get || request.method == Method::head) {
    return handle_fetch(st, rel);
  }
  return http::make_response(405, "text/plain", "unsupported method\n");
}

http::HttpResponse Lab::handle_upload(ScenarioState& st, const http::HttpRequest& request,
                                      std::string_view link_prefix) {
  const ScenarioSpec& spec = st.spec;
  if (spec.upload_method != UploadMethod::post_multipart) {
    return http::make_response(405, "text/plain", "this scenario does not accept POST uploads\n");
  }

  auto content_type = request.header("Content-Type");
  auto boundary = content_type ? http::boundary_from_content_type(*content_type) : std::nullopt;
  if (!boundary) {
    return http::make_response(400, "text/plain", "expected multipart/form-data\n");
  }
  http::MultipartForm form;
  try {
    form = http::parse_multipart(request.body, *boundary);
  } catch (const Error&) {
    return http::make_response(400, "text/plain", "malformed multipart body\n");
  }

  const http::FormPart* file_part = nullptr;
  for (const auto& part : form.parts) {
    if (part.filename) {
      file_part = &part;
      break;
    }
  }
  if (!file_part || file_part->filename->empty()) {
    return http::make_response(400, "text/plain", "no file part\n");
  }

  const std::string& raw_name = *file_part->filename;
  std::string declared = file_part->declared_type.value_or("");

  if (auto rejected = run_validators(spec, raw_name, declared, file_part->content)) {
    std::string body = "<p>" + std::string(reject_marker) + validator_kind_name(*rejected) +
                       "</p>\n";
    return http::make_response(200, "text/html", page(std::move(body)));
  }

  std::string stored_path;
  if (spec.storage.store) {
    std::string name = stored_name(spec.storage, raw_name);
    if (name.empty()) {
      return http::make_response(400, "text/plain", "empty stored name\n");
    }
    stored_path = normalize_path(spec.storage.upload_dir + name);
    st.fs.put(stored_path, file_part->content, now_us());
  }

  if (spec.processing_delay.count() > 0) std::this_thread::sleep_for(spec.processing_delay);

  // Antivirus emulation: uploads holding script code vanish before the
  // response goes out; everything else survives.
  if (spec.delete_after_response && !stored_path.empty() &&
      file_part->content.find("<?php") != std::string::npos) {
    st.fs.erase(stored_path);
  }

  if (spec.render_name_unescaped) {
    std::string body = "<p>Uploaded file: " + raw_name + "</p>\n";
    return http::make_response(200, "text/html", page(std::move(body)));
  }

  std::string href = str::percent_encode_path(std::string(link_prefix) + stored_path);
  std::string body = "<p>" + std::string(stored_marker) + str::html_escape(stored_path) +
                     "</p>\n<p><a href=\"" + href + "\">" + str::html_escape(stored_path) +
                     "</a></p>\n";
  return http::make_response(200, "text/html", page(std::move(body)));
}

http::HttpResponse Lab::handle_put(ScenarioState& st, const http::HttpRequest& request,
                                   std::string_view rel, std::string_view link_prefix) {
  const ScenarioSpec& spec = st.spec;
  constexpr std::string_view uploads = "/uploads/";
  if (spec.upload_method != UploadMethod::put_raw) {
    return http::make_response(405, "text/plain", "PUT is not accepted here\n");
  }
  if (rel.substr(0, uploads.size()) != uploads || rel.size() == uploads.size()) {
    return http::make_response(405, "text/plain", "PUT targets /uploads/<name>\n");
  }
  std::string name = str::percent_decode(rel.substr(uploads.size()));
  std::string stored_path = normalize_path(spec.storage.upload_dir + name);
  st.fs.put(stored_path, request.body, now_us());

  std::string href = str::percent_encode_path(std::string(link_prefix) + stored_path);
  std::string body = "<p>" + std::string(stored_marker) + str::html_escape(stored_path) +
                     "</p>\n<p><a href=\"" + href + "\">" + str::html_escape(stored_path) +
                     "</a></p>\n";
  return http::make_response(201, "text/html", page(std::move(body)));
}

http::HttpResponse Lab::handle_fetch(ScenarioState& st, std::string_view rel) {
  std::string vfs_path = normalize_path(str::percent_decode(rel));
  auto file = st.fs.get(vfs_path);
  if (!file) {
    return http::make_response(404, "text/plain", "not found\n");
  }
  if (should_execute(st.spec, st.fs, vfs_path)) {
    return http::make_response(200, "text/html", interpret(file->bytes));
  }
  return http::make_response(200, content_type_for(st.spec, vfs_path), file->bytes);
}

http::HttpResponse Lab::form_page(const ScenarioState& st) const {
  const ScenarioSpec& spec = st.spec;
  std::string body = "<h1>Scenario s" + std::to_string(spec.id) + ": " +
                     str::html_escape(spec.title) + "</h1>\n";
  if (spec.upload_method == UploadMethod::put_raw) {
    body +=
        "<p>This endpoint stores files via HTTP PUT issued by page script.</p>\n"
        "<script>\n"
        "function upload(name, data) {\n"
        "  return fetch('uploads/' + encodeURIComponent(name), {method: 'PUT', body: data});\n"
        "}\n"
        "</script>\n";
  } else {
    std::string accept =
        spec.form_accept.empty() ? "" : " accept=\"" + str::html_escape(spec.form_accept) + "\"";
    body += "<form enctype=\"multipart/form-data\" method=\"POST\" action=\"upload\">\n"
            "<input type=\"file\" name=\"fileToUpload\"" + accept + "/>\n"
            "<input type=\"submit\" value=\"Upload\" name=\"submit\"/>\n"
            "</form>\n";
  }
  return http::make_response(200, "text/html", page(std::move(body)));
}

LabServer::LabServer(LabServerOptions options)
    : options_(std::move(options)), lab_(LabOptions{options_.response_delay}) {
  try {
    prefix_server_ = std::make_unique<http::Server>(
        [this](const http::HttpRequest& req) { return lab_.handle(req); }, options_.host,
        options_.base_port);
    if (options_.per_port) {
      if (options_.base_port == 0) {
        raise(ErrorCode::invalid_argument, "per-port listeners need an explicit base port");
      }
      for (int n = 1; n <= Lab::scenario_count; ++n) {
        per_port_servers_.push_back(std::make_unique<http::Server>(
            [this, n](const http::HttpRequest& req) {
              return lab_.handle_scenario(n, req, req.target, "");
            },
            options_.host, static_cast<std::uint16_t>(options_.base_port + n)));
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::invalid_argument) throw;
    raise(ErrorCode::lab_startup_failure, std::string("lab startup: ") + e.what());
  }
}

std::string LabServer::base_url() const {
  return "http://" + options_.host + ":" + std::to_string(port());
}

void LabServer::stop() {
  for (auto& server : per_port_servers_) server->stop();
  if (prefix_server_) prefix_server_->stop();
}

} // namespace ufu::lab
