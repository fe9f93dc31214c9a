#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "http/message.hpp"
#include "payloads/forge.hpp"

namespace ufu::mutations {

enum class Technique {
  none,
  mime_spoof,
  alt_extension,
  case_flip,
  infix_extension,
  config_upload,
  nested_extension,
  magic_polyglot,
  metadata_image,
  path_traversal,
  null_byte,
  xss_name,
  race_window,
  put_method,
};

const char* technique_name(Technique technique);

struct ExtensionPolicy {
  // Extensions the target interpreter is assumed to route; lowercase,
  // dot-prefixed.
  std::vector<std::string> dangerous{".php",  ".php3", ".php4", ".php5",
                                     ".php7", ".php8", ".phtml"};
  std::string benign_disguise = ".png";
};

// One candidate attack: a transformed upload request plus the stored-name
// predictions to probe afterwards.
struct MutationPlan {
  Technique technique = Technique::none;
  http::HttpRequest request;
  std::vector<std::string> probe_names;
  std::shared_ptr<MutationPlan> companion; // config_upload's second step
  bool race = false;
  bool has_marker = false; // content carries the run's execution marker
  std::string sent_name;   // filename as transmitted, raw bytes
};

// Everything mutate_all forges into requests. All marker-bearing artifacts
// share the run's nonce token.
struct ArtifactSet {
  payloads::PayloadArtifact script;       // plain marker script
  payloads::PayloadArtifact xss_content;  // markup payload served from content
  payloads::PayloadArtifact xss_named;    // benign bytes behind a markup filename
  payloads::PayloadArtifact magic_script; // magic bytes + marker script
  payloads::PayloadArtifact magic_xss;    // magic bytes + markup payload
  payloads::PayloadArtifact meta_script;  // valid image, marker in metadata
  payloads::PayloadArtifact meta_xss;     // valid image, markup in metadata
  payloads::PayloadArtifact config;       // .htaccess arming the disguise extension
};

ArtifactSet build_artifact_set(const payloads::ExecMarker& marker,
                               const ExtensionPolicy& policy);

// Expands the baseline upload request into the full plan list, one group per
// technique, cheapest mutations first: the unmutated malicious baseline, then
// header/name-only changes (MIME spoof, alternative extensions, case flips,
// infix/nested extensions, traversal, null bytes, markup names), then content
// forgery (magic polyglots, metadata images), then the multi-step and timing
// attacks (config upload, race window, PUT). Within a technique, markup
// variants precede marker variants so a code-execution hit never shadows the
// markup probe. Output order is deterministic for identical inputs.
// The baseline must contain exactly one filename-bearing part
// (ErrorCode::no_file_part otherwise).
std::vector<MutationPlan> mutate_all(const http::HttpRequest& baseline,
                                     const ArtifactSet& artifacts,
                                     const ExtensionPolicy& policy);

// Builds a name that single-pass removal of `banned` collapses back into a
// name ending in `banned` ("exploit" + ".php" -> "exploit.p.phphp").
std::string nest_extension(std::string_view name, std::string_view banned);

// Candidate stored names for a transmitted filename, in probe order: the name
// verbatim, its single-pass ".php"-stripped form, its NUL/"%00"-truncated
// form, its percent-decoded form, and its basename with traversal segments
// dropped. Duplicates collapse to the first occurrence.
std::vector<std::string> predict_stored_names(std::string_view sent_name,
                                              const ExtensionPolicy& policy);

// Raw-body PUT of the artifact at target_dir + suggested_name.
MutationPlan make_put_plan(std::string_view target_dir,
                           const payloads::PayloadArtifact& artifact);

} // namespace ufu::mutations
