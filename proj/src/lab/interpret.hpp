#pragma once

#include <string>
#include <string_view>

namespace ufu::lab {

// Emulated script execution over the marker grammar: every span of the form
// `<?php echo "X"; ?>` (X free of '"') is replaced by X; bytes outside spans
// pass through verbatim; spans that do not parse vanish. The output never
// contains "<?php", which is what separates executed output from disclosed
// source in the scanner's oracle.
std::string interpret(std::string_view bytes);

// Removes exactly the first byte-wise occurrence of `banned`; never recurses.
std::string strip_once(std::string_view name, std::string_view banned);

} // namespace ufu::lab
