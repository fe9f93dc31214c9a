#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Byte-oriented string helpers. Filenames and bodies are raw byte strings
// (std::string), never text: NUL bytes, percent sequences and markup must
// survive every transformation untouched.
namespace ufu::str {

bool iequals(std::string_view a, std::string_view b);
bool istarts_with(std::string_view s, std::string_view prefix);
bool iends_with(std::string_view s, std::string_view suffix);
bool icontains(std::string_view haystack, std::string_view needle);
std::string to_lower(std::string_view s);

std::string_view trim(std::string_view s);

// Percent-encodes every byte outside [A-Za-z0-9._~-] except '/', which is
// kept so multi-segment names ("../shell.php") stay path-shaped.
std::string percent_encode_path(std::string_view raw);

// Decodes %XX sequences; malformed sequences pass through verbatim.
std::string percent_decode(std::string_view encoded);

// Escapes & < > " ' for embedding raw bytes into HTML text or attributes.
std::string html_escape(std::string_view raw);

std::string hex_encode(std::string_view raw);
std::optional<std::string> hex_decode(std::string_view hex);

// Last path segment ("" for paths ending in '/').
std::string_view basename(std::string_view path);

// Directory prefix including the trailing '/' ("/a/b" -> "/a/").
std::string dirname(std::string_view path);

} // namespace ufu::str
