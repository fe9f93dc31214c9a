#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ufu::payloads {

inline constexpr std::string_view png_signature() {
  return std::string_view("\x89PNG\r\n\x1a\n", 8);
}
inline constexpr std::string_view jpeg_soi() { return std::string_view("\xFF\xD8", 2); }

// Well-formed 8-bit RGB PNG of the given size whose pixel data is all-zero
// (deflated, so even 4096x4096 stays small) plus one tEXt chunk carrying
// `text` under the "Comment" keyword.
std::string png_with_text_chunk(std::uint32_t width, std::uint32_t height, std::string_view text);

// Well-formed GIF89a whose logical screen is width x height with a comment
// extension block carrying `text`. The single image frame is 1x1; decoders
// report the logical screen dimensions.
std::string gif_with_comment(std::uint32_t width, std::uint32_t height, std::string_view text);

} // namespace ufu::payloads
