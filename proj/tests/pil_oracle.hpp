#pragma once

// Reference image decoder for tests, independent of the C++ forgers and
// validators: shells out to Pillow and reports the decoded dimensions.

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <utility>

namespace testsupport {

struct DecodedImage {
  unsigned width = 0;
  unsigned height = 0;
};

inline std::optional<DecodedImage> pil_decode(const std::string& bytes) {
  char file_template[] = "/tmp/ufu_pil_XXXXXX";
  int fd = ::mkstemp(file_template);
  if (fd < 0) return std::nullopt;
  ::close(fd);
  {
    std::ofstream out(file_template, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  std::string script =
      "import sys\n"
      "from PIL import Image\n"
      "im = Image.open(sys.argv[1])\n"
      "w, h = im.size\n"
      "im.verify()\n"
      "print(w, h)\n";
  std::string command = "python3 -c \"" + script + "\" " + file_template + " 2>/dev/null";
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) {
    std::remove(file_template);
    return std::nullopt;
  }
  unsigned w = 0;
  unsigned h = 0;
  int matched = std::fscanf(pipe, "%u %u", &w, &h);
  int rc = ::pclose(pipe);
  std::remove(file_template);
  if (rc != 0 || matched != 2) return std::nullopt;
  return DecodedImage{w, h};
}

} // namespace testsupport
