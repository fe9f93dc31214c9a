#include "lab/vfs.hpp"

namespace ufu::lab {

std::string normalize_path(std::string_view raw) {
  std::vector<std::string> segments;
  size_t pos = 0;
  while (pos <= raw.size()) {
    size_t slash = raw.find('/', pos);
    std::string_view seg =
        slash == std::string_view::npos ? raw.substr(pos) : raw.substr(pos, slash - pos);
    if (seg == "..") {
      if (!segments.empty()) segments.pop_back(); // clamp at root
    } else if (!seg.empty() && seg != ".") {
      segments.emplace_back(seg);
    }
    if (slash == std::string_view::npos) break;
    pos = slash + 1;
  }
  std::string out;
  for (const auto& seg : segments) {
    out += '/';
    out += seg;
  }
  return out.empty() ? "/" : out;
}

void VirtualFs::put(std::string_view path, std::string bytes, std::int64_t now_us) {
  std::string key = normalize_path(path);
  std::lock_guard lock(mutex_);
  files_[key] = VirtualFile{key, std::move(bytes), now_us};
}

std::optional<VirtualFile> VirtualFs::get(std::string_view path) const {
  std::string key = normalize_path(path);
  std::lock_guard lock(mutex_);
  auto it = files_.find(key);
  if (it == files_.end()) return std::nullopt;
  return it->second;
}

bool VirtualFs::contains(std::string_view path) const {
  std::string key = normalize_path(path);
  std::lock_guard lock(mutex_);
  return files_.count(key) > 0;
}

bool VirtualFs::erase(std::string_view path) {
  std::string key = normalize_path(path);
  std::lock_guard lock(mutex_);
  return files_.erase(key) > 0;
}

void VirtualFs::clear() {
  std::lock_guard lock(mutex_);
  files_.clear();
}

std::vector<std::string> VirtualFs::paths() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  out.reserve(files_.size());
  for (const auto& [path, file] : files_) out.push_back(path);
  return out;
}

} // namespace ufu::lab
