#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ufu::lab {

enum class ValidatorKind {
  client_side_only,
  mime_header_check,
  extension_denylist,
  extension_allowlist,
  extension_strip_once,
  magic_number_check,
  image_dimension_check,
  size_limit,
};

const char* validator_kind_name(ValidatorKind kind);

struct Validator {
  ValidatorKind kind;
  std::vector<std::string> extensions; // denylist / allowlist entries, lowercase, dot-prefixed
  bool case_sensitive = false;
  bool infix = false;
  std::size_t max_bytes = 0; // size_limit
};

struct InterpreterRules {
  std::vector<std::string> executable_extensions{".php",  ".php3", ".php4", ".php5",
                                                 ".php7", ".php8", ".phtml"};
  bool infix_execution = false;            // S6: any ".php" somewhere in the name runs
  std::vector<std::string> disabled_paths; // path prefixes where execution never happens
};

struct StoragePolicy {
  std::string upload_dir = "/uploads/";
  bool truncate_at_nul = false; // cut the name at a raw 0x00 or a literal "%00" (S12)
  std::optional<std::string> strip_extension_once; // S8: single-pass ".php" removal
  bool store = true;                               // S13 displays the name and keeps nothing
};

enum class UploadMethod { post_multipart, put_raw };

struct ScenarioSpec {
  int id = 0;
  std::string title;
  std::vector<Validator> validators;
  StoragePolicy storage;
  InterpreterRules interpreter;
  std::chrono::milliseconds processing_delay{0};
  bool delete_after_response = false; // S14: emulated antivirus removes flagged files
  UploadMethod upload_method = UploadMethod::post_multipart;
  bool render_name_unescaped = false; // S13: upload page embeds the filename verbatim
  bool htaccess_enabled = false;      // S7: uploaded .htaccess rules take effect
  bool force_octet_stream = false;    // hardened control: never serve a renderable type
  std::string form_accept;            // client-side accept attribute on the form page
};

// The 15 scenarios, in order, ids 1..15.
std::vector<ScenarioSpec> default_scenarios();

// Control scenario with every validator enabled and the interpreter disabled
// everywhere; a sound scanner must report nothing against it.
ScenarioSpec hardened_scenario();

} // namespace ufu::lab
