#include "http/multipart.hpp"

#include "common/error.hpp"
#include "common/strings.hpp"

namespace ufu::http {

namespace {

bool is_boundary_char(unsigned char c) {
  if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) return true;
  return c == '\'' || c == '(' || c == ')' || c == '+' || c == '_' || c == ',' || c == '-' ||
         c == '.' || c == '/' || c == ':' || c == '=' || c == '?';
}

bool valid_boundary(std::string_view b) {
  if (b.empty() || b.size() > 70) return false;
  for (unsigned char c : b) {
    if (!is_boundary_char(c)) return false;
  }
  return true;
}

bool part_collides(const FormPart& part, std::string_view boundary) {
  auto hit = [&](std::string_view field) { return field.find(boundary) != std::string_view::npos; };
  if (hit(part.name) || hit(part.content)) return true;
  if (part.filename && hit(*part.filename)) return true;
  if (part.declared_type && hit(*part.declared_type)) return true;
  return false;
}

// Extracts a quoted parameter value from a Content-Disposition line. The key
// must sit at the start of the value or follow ';' / whitespace so that
// "name" never matches inside "filename". When last_quote is set the value
// runs to the final '"' on the line, which keeps filenames containing quotes
// intact (filename is the last parameter we emit).
std::optional<std::string> extract_quoted(std::string_view header, std::string_view key,
                                          bool last_quote) {
  std::string pattern = std::string(key) + "=\"";
  size_t pos = 0;
  while ((pos = header.find(pattern, pos)) != std::string_view::npos) {
    if (pos > 0) {
      char prev = header[pos - 1];
      if (prev != ';' && prev != ' ' && prev != '\t') {
        pos += pattern.size();
        continue;
      }
    }
    size_t start = pos + pattern.size();
    size_t end = last_quote ? header.rfind('"') : header.find('"', start);
    if (end == std::string_view::npos || end < start) return std::nullopt;
    return std::string(header.substr(start, end - start));
  }
  return std::nullopt;
}

[[noreturn]] void malformed(const char* what) {
  raise(ErrorCode::malformed_multipart, what);
}

} // namespace

std::string generate_boundary(Rng& rng, const std::vector<FormPart>& parts) {
  for (;;) {
    std::string candidate = rng.alnum(24);
    bool collision = false;
    for (const auto& part : parts) {
      if (part_collides(part, candidate)) {
        collision = true;
        break;
      }
    }
    if (!collision) return candidate;
  }
}

std::string serialize_multipart(const MultipartForm& form) {
  if (form.parts.empty()) {
    raise(ErrorCode::invalid_argument, "multipart form needs at least one part");
  }
  if (!valid_boundary(form.boundary)) {
    raise(ErrorCode::invalid_argument, "boundary is not a 1-70 char token");
  }
  for (const auto& part : form.parts) {
    if (part_collides(part, form.boundary)) {
      raise(ErrorCode::boundary_collision, "boundary occurs in part content");
    }
  }

  std::string out;
  for (const auto& part : form.parts) {
    out += "--" + form.boundary + "\r\n";
    out += "Content-Disposition: form-data; name=\"" + part.name + "\"";
    if (part.filename) {
      out += "; filename=\"" + *part.filename + "\"";
    }
    out += "\r\n";
    if (part.declared_type) {
      out += "Content-Type: " + *part.declared_type + "\r\n";
    }
    out += "\r\n";
    out += part.content;
    out += "\r\n";
  }
  out += "--" + form.boundary + "--\r\n";
  return out;
}

MultipartForm parse_multipart(std::string_view body, std::string_view boundary) {
  const std::string open = "--" + std::string(boundary) + "\r\n";
  if (body.substr(0, open.size()) != open) {
    malformed("body does not start with the opening boundary");
  }

  MultipartForm form;
  form.boundary = std::string(boundary);

  const std::string delim = "\r\n--" + std::string(boundary);
  size_t pos = open.size();
  for (;;) {
    FormPart part;
    bool have_disposition = false;

    for (;;) {
      size_t eol = body.find("\r\n", pos);
      if (eol == std::string_view::npos) malformed("unterminated part header");
      std::string_view line = body.substr(pos, eol - pos);
      pos = eol + 2;
      if (line.empty()) break; // blank line, content follows
      if (line.front() == ' ' || line.front() == '\t') malformed("folded header line");
      size_t colon = line.find(':');
      if (colon == std::string_view::npos) malformed("part header without colon");
      std::string_view hname = str::trim(line.substr(0, colon));
      std::string_view hvalue = str::trim(line.substr(colon + 1));
      if (str::iequals(hname, "Content-Disposition")) {
        auto name = extract_quoted(hvalue, "name", /*last_quote=*/false);
        if (!name) malformed("Content-Disposition without a name");
        part.name = *name;
        part.filename = extract_quoted(hvalue, "filename", /*last_quote=*/true);
        have_disposition = true;
      } else if (str::iequals(hname, "Content-Type")) {
        part.declared_type = std::string(hvalue);
      }
      // other part headers are ignored
    }
    if (!have_disposition) malformed("part without Content-Disposition");

    // Content runs to the next "\r\n--boundary" that is followed by either
    // "\r\n" (another part) or "--\r\n" (terminator). A stray boundary-like
    // byte run inside content does not end the part.
    size_t search = pos;
    bool closed = false;
    for (;;) {
      size_t hit = body.find(delim, search);
      if (hit == std::string_view::npos) malformed("missing terminal boundary");
      size_t after = hit + delim.size();
      if (body.substr(after, 2) == "\r\n") {
        part.content = std::string(body.substr(pos, hit - pos));
        pos = after + 2;
        break;
      }
      if (body.substr(after, 4) == "--\r\n") {
        part.content = std::string(body.substr(pos, hit - pos));
        pos = after + 4;
        closed = true;
        break;
      }
      search = hit + 1;
    }
    form.parts.push_back(std::move(part));
    if (closed) {
      if (pos != body.size()) malformed("trailing bytes after terminal boundary");
      return form;
    }
  }
}

std::optional<std::string> boundary_from_content_type(std::string_view content_type) {
  if (!str::istarts_with(str::trim(content_type), "multipart/form-data")) return std::nullopt;
  size_t pos = 0;
  std::string_view key = "boundary=";
  while ((pos = content_type.find(key, pos)) != std::string_view::npos) {
    if (pos > 0) {
      char prev = content_type[pos - 1];
      if (prev != ';' && prev != ' ' && prev != '\t') {
        pos += key.size();
        continue;
      }
    }
    std::string_view rest = content_type.substr(pos + key.size());
    if (!rest.empty() && rest.front() == '"') {
      size_t close = rest.find('"', 1);
      if (close == std::string_view::npos) return std::nullopt;
      return std::string(rest.substr(1, close - 1));
    }
    size_t end = rest.find(';');
    return std::string(str::trim(rest.substr(0, end)));
  }
  return std::nullopt;
}

std::string multipart_content_type(std::string_view boundary) {
  return "multipart/form-data; boundary=" + std::string(boundary);
}

} // namespace ufu::http
