#include "payloads/image.hpp"

#include <zlib.h>

#include <vector>

#include "common/error.hpp"

namespace ufu::payloads {

namespace {

void put_be32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>(v & 0xFF));
}

void put_le16(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void append_chunk(std::string& out, std::string_view type, std::string_view data) {
  put_be32(out, static_cast<std::uint32_t>(data.size()));
  std::string body(type);
  body += data;
  out += body;
  auto crc = ::crc32(0L, reinterpret_cast<const Bytef*>(body.data()),
                     static_cast<uInt>(body.size()));
  put_be32(out, static_cast<std::uint32_t>(crc));
}

// Deflates h scanlines of (1 filter byte + 3w zero pixel bytes) without ever
// materializing the raw image, so large dimensions cost only the compressed
// output (~50 KiB at 4096x4096).
std::string deflate_zero_scanlines(std::uint32_t width, std::uint32_t height) {
  z_stream zs{};
  if (deflateInit(&zs, Z_BEST_COMPRESSION) != Z_OK) {
    raise(ErrorCode::internal, "deflateInit failed");
  }
  const size_t row_bytes = 1 + static_cast<size_t>(width) * 3;
  std::vector<unsigned char> row(row_bytes, 0);
  std::string out;
  std::vector<unsigned char> buf(64 * 1024);
  for (std::uint32_t y = 0; y < height; ++y) {
    zs.next_in = row.data();
    zs.avail_in = static_cast<uInt>(row_bytes);
    bool last = (y + 1 == height);
    do {
      zs.next_out = buf.data();
      zs.avail_out = static_cast<uInt>(buf.size());
      int rc = deflate(&zs, last ? Z_FINISH : Z_NO_FLUSH);
      if (rc == Z_STREAM_ERROR) {
        deflateEnd(&zs);
        raise(ErrorCode::internal, "deflate failed");
      }
      out.append(reinterpret_cast<char*>(buf.data()), buf.size() - zs.avail_out);
      if (last && rc == Z_STREAM_END) break;
    } while (zs.avail_in > 0 || last);
  }
  deflateEnd(&zs);
  return out;
}

} // namespace

std::string png_with_text_chunk(std::uint32_t width, std::uint32_t height, std::string_view text) {
  std::string out(png_signature());

  std::string ihdr;
  put_be32(ihdr, width);
  put_be32(ihdr, height);
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(2);  // color type: truecolor RGB
  ihdr.push_back(0);  // compression
  ihdr.push_back(0);  // filter
  ihdr.push_back(0);  // interlace
  append_chunk(out, "IHDR", ihdr);

  std::string kw = "Comment";
  kw.push_back('\0');
  kw += text;
  append_chunk(out, "tEXt", kw);

  append_chunk(out, "IDAT", deflate_zero_scanlines(width, height));
  append_chunk(out, "IEND", "");
  return out;
}

std::string gif_with_comment(std::uint32_t width, std::uint32_t height, std::string_view text) {
  std::string out = "GIF89a";
  put_le16(out, width);
  put_le16(out, height);
  out.push_back(static_cast<char>(0xF0)); // global color table, 2 entries, 8-bit color res
  out.push_back(0);                       // background color index
  out.push_back(0);                       // pixel aspect ratio
  out += std::string("\x00\x00\x00\xFF\xFF\xFF", 6); // palette: black, white

  // comment extension, text split into <=255 byte sub-blocks
  out.push_back(0x21);
  out.push_back(static_cast<char>(0xFE));
  for (size_t off = 0; off < text.size(); off += 255) {
    size_t n = std::min<size_t>(255, text.size() - off);
    out.push_back(static_cast<char>(n));
    out.append(text.data() + off, n);
  }
  out.push_back(0); // block terminator

  // 1x1 image frame: descriptor, then LZW data (min code size 2) encoding
  // CLEAR, pixel 0, EOI as 3-bit codes -> bytes 0x44 0x01
  out.push_back(0x2C);
  put_le16(out, 0);
  put_le16(out, 0);
  put_le16(out, 1);
  put_le16(out, 1);
  out.push_back(0); // no local color table
  out.push_back(2); // LZW minimum code size
  out.push_back(2); // sub-block length
  out.push_back(0x44);
  out.push_back(0x01);
  out.push_back(0); // image data terminator

  out.push_back(0x3B); // trailer
  return out;
}

} // namespace ufu::payloads
