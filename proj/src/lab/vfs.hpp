#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ufu::lab {

// Collapses "." and ".." segments and clamps escapes at the virtual root, so
// "../../../etc/x" under /uploads/ resolves to "/etc/x" inside the sandbox
// and can never touch a real filesystem. The result always starts with '/'.
std::string normalize_path(std::string_view raw);

struct VirtualFile {
  std::string path;
  std::string bytes;
  std::int64_t created_at_us = 0;
};

// Per-scenario in-memory document root. All access is synchronized; lookups
// are exact-match on the normalized path.
class VirtualFs {
public:
  void put(std::string_view path, std::string bytes, std::int64_t now_us);
  std::optional<VirtualFile> get(std::string_view path) const;
  bool contains(std::string_view path) const;
  bool erase(std::string_view path);
  void clear();
  std::vector<std::string> paths() const;

private:
  mutable std::mutex mutex_;
  std::map<std::string, VirtualFile> files_;
};

} // namespace ufu::lab
