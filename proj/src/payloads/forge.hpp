#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "common/rng.hpp"

namespace ufu::payloads {

// The one script construct the lab interpreter understands. Execution is
// proven by the nonce token coming back alone, without the surrounding tag.
struct ExecMarker {
  std::string token;       // 16 alphanumeric chars, unique per scan run
  std::string source_form; // `<?php echo "TOKEN"; ?>`
};

ExecMarker make_marker(Rng& rng);
ExecMarker marker_from_token(std::string token);

enum class PayloadKind {
  plain_script,
  magic_byte_polyglot,
  image_metadata,
  directory_config,
  xss_html,
  xss_filename,
};

const char* payload_kind_name(PayloadKind kind);

struct PayloadArtifact {
  PayloadKind kind;
  std::string bytes;
  std::optional<ExecMarker> marker;
  std::string suggested_name;
};

enum class MagicHeader { gif87a, gif89a, png_signature, jpeg_soi };
enum class ImageContainer { png, gif };

inline constexpr std::string_view xss_payload = "<img src=x onerror=alert(1)>";

enum class XssCarrier { file_content, file_name };

struct XssProbe {
  std::string payload{xss_payload};
  XssCarrier carrier = XssCarrier::file_content;
};

// Bare marker script, suggested name "exploit.php".
PayloadArtifact forge_plain_script(const ExecMarker& marker);

// Magic bytes followed by the marker script; fools leading-bytes type sniffing
// while the script still executes when routed to the interpreter.
PayloadArtifact forge_magic_polyglot(const ExecMarker& marker, MagicHeader header);

// A decodable image of the requested dimensions with the marker script inside
// a metadata chunk (PNG tEXt / GIF comment extension). Throws
// ErrorCode::dimension_out_of_range unless 1 <= width, height <= 4096.
PayloadArtifact forge_image_metadata(const ExecMarker& marker, ImageContainer container,
                                     std::uint32_t width, std::uint32_t height);

// Same containers carrying an arbitrary text instead of the marker; used to
// smuggle markup past image-content validators.
PayloadArtifact forge_image_with_text(ImageContainer container, std::uint32_t width,
                                      std::uint32_t height, std::string_view text);

// One `AddType application/x-httpd-php <ext>` line named ".htaccess". The
// config file itself carries no marker; it arms a companion upload.
// target_extension must be non-empty and dot-prefixed.
PayloadArtifact forge_directory_config(std::string_view target_extension);

struct XssForgery {
  XssProbe probe;
  PayloadArtifact artifact;
};

XssForgery forge_xss(XssCarrier carrier);

} // namespace ufu::payloads
