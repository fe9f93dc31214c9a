#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "common/rng.hpp"

namespace ufu::http {

// One multipart/form-data block. The filename is a raw byte string and is
// serialized verbatim: NUL bytes, literal "%00" sequences and HTML markup are
// the attack surface and must survive a round-trip unchanged.
struct FormPart {
  std::string name;
  std::optional<std::string> filename;
  std::optional<std::string> declared_type;
  std::string content;

  bool operator==(const FormPart&) const = default;
};

struct MultipartForm {
  std::string boundary;
  std::vector<FormPart> parts;

  bool operator==(const MultipartForm&) const = default;
};

// 24 random alphanumerics, regenerated while colliding with any part content.
std::string generate_boundary(Rng& rng, const std::vector<FormPart>& parts);

// Emits `--boundary\r\n` delimited blocks, each with a Content-Disposition
// line (plus Content-Type when declared), a blank line and the raw content,
// terminated by `--boundary--\r\n`. Throws ErrorCode::boundary_collision when
// the boundary occurs in any part field and ErrorCode::invalid_argument for
// an empty part list or a non-token boundary.
std::string serialize_multipart(const MultipartForm& form);

// Strict inverse of serialize_multipart. CRLF line endings are mandatory;
// header folding, a missing blank line, a part without a Content-Disposition
// name or a missing terminal boundary raise ErrorCode::malformed_multipart.
// Unknown part headers are ignored. Filename bytes are recovered verbatim.
MultipartForm parse_multipart(std::string_view body, std::string_view boundary);

// Pulls the boundary parameter out of a multipart/form-data Content-Type
// header value.
std::optional<std::string> boundary_from_content_type(std::string_view content_type);

std::string multipart_content_type(std::string_view boundary);

} // namespace ufu::http
