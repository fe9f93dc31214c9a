#include "lab/scenario.hpp"

namespace ufu::lab {

const char* validator_kind_name(ValidatorKind kind) {
  switch (kind) {
    case ValidatorKind::client_side_only: return "client_side_only";
    case ValidatorKind::mime_header_check: return "mime_header_check";
    case ValidatorKind::extension_denylist: return "extension_denylist";
    case ValidatorKind::extension_allowlist: return "extension_allowlist";
    case ValidatorKind::extension_strip_once: return "extension_strip_once";
    case ValidatorKind::magic_number_check: return "magic_number_check";
    case ValidatorKind::image_dimension_check: return "image_dimension_check";
    case ValidatorKind::size_limit: return "size_limit";
  }
  return "unknown";
}

namespace {

Validator simple(ValidatorKind kind) {
  Validator v;
  v.kind = kind;
  return v;
}

Validator denylist(std::vector<std::string> extensions, bool case_sensitive, bool infix) {
  Validator v;
  v.kind = ValidatorKind::extension_denylist;
  v.extensions = std::move(extensions);
  v.case_sensitive = case_sensitive;
  v.infix = infix;
  return v;
}

const std::vector<std::string>& executable_extensions() {
  static const std::vector<std::string> exts{".php",  ".php3", ".php4", ".php5",
                                             ".php7", ".php8", ".phtml"};
  return exts;
}

} // namespace

std::vector<ScenarioSpec> default_scenarios() {
  std::vector<ScenarioSpec> specs;
  specs.reserve(15);

  { // S1 "Unrestricted": the baseline, nothing is validated.
    ScenarioSpec s;
    s.id = 1;
    s.title = "Unrestricted";
    specs.push_back(std::move(s));
  }
  { // S2 "Client-side": the form carries an accept filter, the server none.
    ScenarioSpec s;
    s.id = 2;
    s.title = "Client-side";
    s.validators.push_back(simple(ValidatorKind::client_side_only));
    s.form_accept = ".png";
    specs.push_back(std::move(s));
  }
  { // S3 "MIME-type": only the declared Content-Type of the part is checked.
    ScenarioSpec s;
    s.id = 3;
    s.title = "MIME-type";
    s.validators.push_back(simple(ValidatorKind::mime_header_check));
    specs.push_back(std::move(s));
  }
  { // S4 "Extension I": ".php" is denied; other interpreter-routed
    // extensions (.php5, .php8, ...) slip through.
    ScenarioSpec s;
    s.id = 4;
    s.title = "Extension I";
    s.validators.push_back(denylist({".php"}, /*case_sensitive=*/true, /*infix=*/false));
    specs.push_back(std::move(s));
  }
  { // S5 "Extension II": same denylist, but the server maps only ".php"
    // (case-insensitively) to the interpreter, so capitalization is the
    // one bypass; alternative extensions upload but never run.
    ScenarioSpec s;
    s.id = 5;
    s.title = "Extension II";
    s.validators.push_back(denylist({".php"}, /*case_sensitive=*/true, /*infix=*/false));
    s.interpreter.executable_extensions = {".php"};
    specs.push_back(std::move(s));
  }
  { // S6 "Extension III": exact-suffix denylist while the server executes
    // anything with ".php" somewhere in the name.
    ScenarioSpec s;
    s.id = 6;
    s.title = "Extension III";
    s.validators.push_back(denylist({".php"}, /*case_sensitive=*/false, /*infix=*/false));
    s.interpreter.infix_execution = true;
    specs.push_back(std::move(s));
  }
  { // S7 "Extension IV": executable extensions are denied but configuration
    // files are not, and uploaded .htaccess rules take effect.
    ScenarioSpec s;
    s.id = 7;
    s.title = "Extension IV";
    s.validators.push_back(denylist(executable_extensions(), /*case_sensitive=*/false,
                                    /*infix=*/false));
    s.htaccess_enabled = true;
    specs.push_back(std::move(s));
  }
  { // S8 "Extension V": ".php" is stripped from the name exactly once.
    ScenarioSpec s;
    s.id = 8;
    s.title = "Extension V";
    s.validators.push_back(simple(ValidatorKind::extension_strip_once));
    s.storage.strip_extension_once = ".php";
    specs.push_back(std::move(s));
  }
  { // S9 "Magic number": leading bytes decide the type.
    ScenarioSpec s;
    s.id = 9;
    s.title = "Magic number";
    s.validators.push_back(simple(ValidatorKind::magic_number_check));
    specs.push_back(std::move(s));
  }
  { // S10 "File content": the image must actually decode with dimensions.
    ScenarioSpec s;
    s.id = 10;
    s.title = "File content";
    s.validators.push_back(simple(ValidatorKind::image_dimension_check));
    specs.push_back(std::move(s));
  }
  { // S11 "Directory configuration": execution is off under /uploads/, and
    // traversal in the stored name escapes that directory.
    ScenarioSpec s;
    s.id = 11;
    s.title = "Directory configuration";
    s.interpreter.disabled_paths = {"/uploads/"};
    specs.push_back(std::move(s));
  }
  { // S12 "Special characters": ".png" allowlist on the raw name; storage
    // truncates at the first NUL, raw or percent-encoded.
    ScenarioSpec s;
    s.id = 12;
    s.title = "Special characters";
    Validator allow;
    allow.kind = ValidatorKind::extension_allowlist;
    allow.extensions = {".png"};
    s.validators.push_back(std::move(allow));
    s.storage.truncate_at_nul = true;
    specs.push_back(std::move(s));
  }
  { // S13 "XSS": nothing is stored; the upload page renders the file name
    // without escaping.
    ScenarioSpec s;
    s.id = 13;
    s.title = "XSS";
    s.storage.store = false;
    s.render_name_unescaped = true;
    specs.push_back(std::move(s));
  }
  { // S14 "Race condition": a 0.5 s antivirus emulation deletes flagged
    // uploads before the response is returned.
    ScenarioSpec s;
    s.id = 14;
    s.title = "Race condition";
    s.processing_delay = std::chrono::milliseconds(500);
    s.delete_after_response = true;
    specs.push_back(std::move(s));
  }
  { // S15 "PUT method": files are created by raw PUT requests driven by
    // page script; the multipart endpoint does not exist here.
    ScenarioSpec s;
    s.id = 15;
    s.title = "PUT method";
    s.upload_method = UploadMethod::put_raw;
    specs.push_back(std::move(s));
  }
  return specs;
}

ScenarioSpec hardened_scenario() {
  ScenarioSpec s;
  s.id = 0;
  s.title = "Hardened control";
  s.validators.push_back(simple(ValidatorKind::client_side_only));
  s.validators.push_back(simple(ValidatorKind::mime_header_check));
  s.validators.push_back(denylist(executable_extensions(), /*case_sensitive=*/false,
                                  /*infix=*/true));
  s.validators.push_back(simple(ValidatorKind::extension_strip_once));
  s.validators.push_back(simple(ValidatorKind::magic_number_check));
  s.validators.push_back(simple(ValidatorKind::image_dimension_check));
  Validator size;
  size.kind = ValidatorKind::size_limit;
  size.max_bytes = 100 * 1024;
  s.validators.push_back(std::move(size));
  s.storage.strip_extension_once = ".php";
  s.storage.truncate_at_nul = true;
  s.interpreter.disabled_paths = {"/"};
  s.force_octet_stream = true;
  s.form_accept = ".png";
  return s;
}

} // namespace ufu::lab
