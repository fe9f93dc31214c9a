#include "lab/interpret.hpp"

#include <optional>

namespace ufu::lab {

namespace {

constexpr std::string_view open_tag = "<?php";
constexpr std::string_view close_tag = "?>";

// Matches `<?php` WS `echo` WS `"X"` WS? `;` WS? `?>` and yields X.
std::optional<std::string_view> parse_echo_span(std::string_view span) {
  std::string_view s = span;
  s.remove_prefix(open_tag.size());
  s.remove_suffix(close_tag.size());

  auto skip_ws = [&](bool required) -> bool {
    size_t n = 0;
    while (n < s.size() && (s[n] == ' ' || s[n] == '\t' || s[n] == '\r' || s[n] == '\n')) ++n;
    if (required && n == 0) return false;
    s.remove_prefix(n);
    return true;
  };

  if (!skip_ws(true)) return std::nullopt;
  if (s.substr(0, 4) != "echo") return std::nullopt;
  s.remove_prefix(4);
  if (!skip_ws(true)) return std::nullopt;
  if (s.empty() || s.front() != '"') return std::nullopt;
  s.remove_prefix(1);
  size_t close = s.find('"');
  if (close == std::string_view::npos) return std::nullopt;
  std::string_view value = s.substr(0, close);
  s.remove_prefix(close + 1);
  skip_ws(false);
  if (s.empty() || s.front() != ';') return std::nullopt;
  s.remove_prefix(1);
  skip_ws(false);
  if (!s.empty()) return std::nullopt;
  return value;
}

} // namespace

std::string interpret(std::string_view bytes) {
  std::string out;
  out.reserve(bytes.size());
  size_t pos = 0;
  for (;;) {
    size_t open = bytes.find(open_tag, pos);
    if (open == std::string_view::npos) {
      out.append(bytes.substr(pos));
      break;
    }
    out.append(bytes.substr(pos, open - pos));
    size_t close = bytes.find(close_tag, open + open_tag.size());
    if (close == std::string_view::npos) {
      break; // unclosed tag swallows the rest of the file
    }
    std::string_view span = bytes.substr(open, close + close_tag.size() - open);
    if (auto value = parse_echo_span(span)) {
      // Guard the soundness invariant: an echoed value may not reintroduce
      // an open tag into the output.
      if (value->find(open_tag) == std::string_view::npos) out.append(*value);
    }
    pos = close + close_tag.size();
  }
  // Adversarial inputs can assemble "<?php" across a span boundary
  // ("<?p" + echoed "hp..."); scrub any such residue.
  for (size_t hit; (hit = out.find(open_tag)) != std::string::npos;) {
    out.erase(hit, open_tag.size());
  }
  return out;
}

std::string strip_once(std::string_view name, std::string_view banned) {
  std::string out(name);
  if (banned.empty()) return out;
  size_t hit = out.find(banned);
  if (hit != std::string::npos) out.erase(hit, banned.size());
  return out;
}

} // namespace ufu::lab
