#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "http/client.hpp"
#include "http/message.hpp"
#include "mutations/mutations.hpp"
#include "payloads/forge.hpp"

namespace ufu::scanner {

enum class Verdict { ifub, ce, xss };

const char* verdict_name(Verdict verdict);
std::optional<Verdict> verdict_from_name(std::string_view name);

struct ScanConfig {
  std::string upload_url;
  std::string form_field = "fileToUpload";
  // Resolved against the upload URL's directory when it starts with '/', so
  // the default works for endpoints mounted below the server root.
  std::string uploads_hint = "/uploads/";
  std::chrono::milliseconds per_scenario_timeout{300 * 1000};
  int race_burst = 20; // 0 turns the race engine off
  std::chrono::milliseconds race_spacing{25};
  std::optional<std::uint64_t> seed; // nullopt: UFU_FORGE_SEED env or entropy
  mutations::ExtensionPolicy policy;
};

struct Evidence {
  std::string request_excerpt; // leading bytes of the wire request
  int response_status = 0;
  std::string matched_excerpt; // the token, the markup payload, or the acceptance line
};

struct Finding {
  Verdict verdict = Verdict::ifub;
  mutations::Technique technique = mutations::Technique::none;
  std::string proof_url;
  Evidence evidence;
  std::int64_t timestamp_ms = 0;
};

struct ScanResult {
  std::vector<Finding> findings;
  bool timed_out = false;
  int requests_sent = 0;
};

// Execution is proven by the echoed token arriving *without* the opening
// script tag; a raw-served payload contains its own token and must not count.
bool verify_ce(std::string_view fetched_body, const payloads::ExecMarker& marker);

// Markup counts only in a text/html response and only unescaped; an
// entity-escaped reflection never matches because '<' is gone.
bool verify_xss(const http::HttpResponse& response, const payloads::XssProbe& probe);

// Candidate URLs (paths) to probe after an upload: href/src attributes and
// absolute-path tokens in the response that reference a candidate name come
// first, then hint-joined candidates not already covered.
std::vector<std::string> discover_stored_url(const http::HttpResponse& upload_response,
                                             std::string_view hint,
                                             const std::vector<std::string>& candidates);

struct RaceOutcome {
  std::optional<Finding> finding;
  std::optional<http::HttpResponse> upload_response;
  int requests_sent = 0;
};

// One race attempt: fires the upload, then probes the first predicted URL at
// race_spacing intervals while the upload response is still in flight. Stops
// early on a hit, or one probe after the upload settles.
RaceOutcome race_exploit(const ScanConfig& config, const mutations::MutationPlan& plan,
                         const payloads::ExecMarker& marker, const payloads::XssProbe& probe);

// The full attack loop: generate plans, send each, rediscover stored files,
// verify CE/XSS, race where the plan asks for it. A technique stops after its
// first CE success; remaining techniques still run for coverage. Times out
// into partial results, never into failure. Throws
// ErrorCode::target_unreachable when the endpoint never answers.
ScanResult scan(const ScanConfig& config);

} // namespace ufu::scanner
