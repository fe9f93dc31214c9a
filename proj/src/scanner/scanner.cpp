#include "scanner/scanner.hpp"

#include <algorithm>
#include <future>
#include <thread>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "common/strings.hpp"
#include "http/multipart.hpp"

namespace ufu::scanner {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::string_view reject_marker = "FUEL-REJECTED";
constexpr size_t kMaxProbeUrls = 8;
constexpr int kRaceAttempts = 3;

std::int64_t unix_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string request_excerpt(const http::HttpRequest& request, std::string_view authority) {
  std::string wire = http::serialize_request(request, authority);
  if (wire.size() > 512) wire.resize(512);
  return wire;
}

std::string_view target_path(std::string_view target) {
  size_t q = target.find('?');
  return q == std::string_view::npos ? target : target.substr(0, q);
}

// "/s3/upload" + "/uploads/" -> "/s3/uploads/"
std::string resolve_hint(std::string_view upload_path, std::string_view hint) {
  std::string dir = str::dirname(target_path(upload_path));
  if (hint.empty()) return dir;
  if (hint.front() == '/') {
    std::string base = dir == "/" ? "" : dir.substr(0, dir.size() - 1);
    return base + std::string(hint);
  }
  return dir + std::string(hint);
}

bool is_acceptance(const http::HttpResponse& response) {
  return response.status >= 200 && response.status < 300 &&
         response.body.find(reject_marker) == std::string::npos;
}

std::string acceptance_excerpt(const http::HttpResponse& response) {
  size_t hit = response.body.find("FUEL-STORED: ");
  if (hit != std::string::npos) {
    size_t end = response.body.find_first_of("<\r\n", hit);
    return response.body.substr(hit, end == std::string::npos ? std::string::npos : end - hit);
  }
  return "HTTP " + std::to_string(response.status) + " acceptance";
}

// Everything the plan loop needs to talk to one target.
struct Session {
  http::Endpoint endpoint;
  std::string upload_path;
  std::string hint;
  Clock::time_point deadline;
  int requests = 0;
  bool timed_out = false;

  std::chrono::milliseconds remaining() const {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    return left;
  }

  bool expired() {
    if (remaining().count() <= 0) {
      timed_out = true;
      return true;
    }
    return false;
  }

  // nullopt on transport failure or per-request timeout.
  std::optional<http::HttpResponse> exchange(const http::HttpRequest& request) {
    auto budget = std::min<std::chrono::milliseconds>(remaining(), std::chrono::seconds(30));
    if (budget.count() <= 0) {
      timed_out = true;
      return std::nullopt;
    }
    ++requests;
    try {
      return http::http_roundtrip(endpoint, request, budget);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::timeout && remaining().count() <= 0) timed_out = true;
      return std::nullopt;
    }
  }

  std::optional<http::HttpResponse> fetch(std::string_view path) {
    http::HttpRequest req;
    req.method = http::Method::get;
    req.target = std::string(path);
    return exchange(req);
  }

  std::string url_for(std::string_view path) const {
    return "http://" + endpoint.authority() + std::string(path);
  }
};

// Deduplicates findings per (verdict, technique) and assembles evidence.
struct FindingSink {
  std::vector<Finding>& findings;

  bool seen(Verdict verdict, mutations::Technique technique) const {
    return std::any_of(findings.begin(), findings.end(), [&](const Finding& f) {
      return f.verdict == verdict && f.technique == technique;
    });
  }

  void add(Verdict verdict, mutations::Technique technique, std::string proof_url,
           Evidence evidence) {
    if (seen(verdict, technique)) return;
    findings.push_back(Finding{verdict, technique, std::move(proof_url), std::move(evidence),
                               unix_ms()});
  }
};

std::vector<std::string> extract_link_paths(std::string_view body) {
  std::vector<std::string> out;
  // href="..." / src="..." attribute values
  for (std::string_view key : {std::string_view("href=\""), std::string_view("src=\"")}) {
    size_t pos = 0;
    while ((pos = body.find(key, pos)) != std::string_view::npos) {
      size_t start = pos + key.size();
      size_t end = body.find('"', start);
      if (end == std::string_view::npos) break;
      out.emplace_back(body.substr(start, end - start));
      pos = end + 1;
    }
  }
  // bare absolute-path tokens (e.g. the stored-path line of an upload page)
  static constexpr std::string_view delims = " \t\r\n\"'<>";
  size_t pos = 0;
  while (pos < body.size()) {
    size_t start = body.find_first_not_of(delims, pos);
    if (start == std::string_view::npos) break;
    size_t end = body.find_first_of(delims, start);
    if (end == std::string_view::npos) end = body.size();
    if (body[start] == '/') out.emplace_back(body.substr(start, end - start));
    pos = end;
  }
  return out;
}

} // namespace

const char* verdict_name(Verdict verdict) {
  switch (verdict) {
    case Verdict::ifub: return "iFUB";
    case Verdict::ce: return "CE";
    case Verdict::xss: return "XSS";
  }
  return "unknown";
}

std::optional<Verdict> verdict_from_name(std::string_view name) {
  if (name == "iFUB") return Verdict::ifub;
  if (name == "CE") return Verdict::ce;
  if (name == "XSS") return Verdict::xss;
  return std::nullopt;
}

bool verify_ce(std::string_view fetched_body, const payloads::ExecMarker& marker) {
  return fetched_body.find(marker.token) != std::string_view::npos &&
         fetched_body.find("<?php") == std::string_view::npos;
}

bool verify_xss(const http::HttpResponse& response, const payloads::XssProbe& probe) {
  auto content_type = response.header("Content-Type");
  if (!content_type || !str::istarts_with(str::trim(*content_type), "text/html")) return false;
  return response.body.find(probe.payload) != std::string::npos;
}

std::vector<std::string> discover_stored_url(const http::HttpResponse& upload_response,
                                             std::string_view hint,
                                             const std::vector<std::string>& candidates) {
  std::vector<std::string> urls;
  std::vector<std::string> seen_decoded;
  auto push = [&](std::string url) {
    std::string decoded = str::percent_decode(url);
    if (std::find(seen_decoded.begin(), seen_decoded.end(), decoded) != seen_decoded.end()) {
      return;
    }
    seen_decoded.push_back(std::move(decoded));
    urls.push_back(std::move(url));
  };

  for (auto& link : extract_link_paths(upload_response.body)) {
    std::string decoded = str::percent_decode(link);
    std::string_view base = str::basename(decoded);
    if (base.empty()) continue;
    for (const auto& candidate : candidates) {
      if (base == str::basename(candidate)) {
        push(link);
        break;
      }
    }
  }
  for (const auto& candidate : candidates) {
    push(std::string(hint) + str::percent_encode_path(candidate));
  }
  if (urls.size() > kMaxProbeUrls) urls.resize(kMaxProbeUrls);
  return urls;
}

RaceOutcome race_exploit(const ScanConfig& config, const mutations::MutationPlan& plan,
                         const payloads::ExecMarker& marker, const payloads::XssProbe& probe) {
  auto parsed = http::parse_url(config.upload_url);
  RaceOutcome outcome;
  if (plan.probe_names.empty()) return outcome;

  std::string hint = resolve_hint(parsed.target, config.uploads_hint);
  std::string probe_path = hint + str::percent_encode_path(plan.probe_names.front());

  auto upload = std::async(std::launch::async, [&]() -> std::optional<http::HttpResponse> {
    try {
      return http::http_roundtrip(parsed.endpoint, plan.request, std::chrono::seconds(30));
    } catch (const Error&) {
      return std::nullopt;
    }
  });
  outcome.requests_sent = 1;

  bool upload_settled_before_probe = false;
  for (int i = 0; i < config.race_burst; ++i) {
    http::HttpRequest get;
    get.method = http::Method::get;
    get.target = probe_path;
    std::optional<http::HttpResponse> fetched;
    try {
      fetched = http::http_roundtrip(parsed.endpoint, get, std::chrono::seconds(5));
    } catch (const Error&) {
    }
    ++outcome.requests_sent;

    if (fetched) {
      if (plan.has_marker && verify_ce(fetched->body, marker)) {
        Evidence evidence{request_excerpt(plan.request, parsed.endpoint.authority()),
                          fetched->status, marker.token};
        outcome.finding = Finding{Verdict::ce, plan.technique,
                                  "http://" + parsed.endpoint.authority() + probe_path,
                                  std::move(evidence), unix_ms()};
        break;
      }
      if (!plan.has_marker && verify_xss(*fetched, probe)) {
        Evidence evidence{request_excerpt(plan.request, parsed.endpoint.authority()),
                          fetched->status, probe.payload};
        outcome.finding = Finding{Verdict::xss, plan.technique,
                                  "http://" + parsed.endpoint.authority() + probe_path,
                                  std::move(evidence), unix_ms()};
        break;
      }
    }

    // Once the upload response has settled, the window is decided; allow one
    // post-completion probe and stop.
    bool settled = upload.wait_for(std::chrono::seconds(0)) == std::future_status::ready;
    if (settled) {
      if (upload_settled_before_probe) break;
      upload_settled_before_probe = true;
      continue;
    }
    std::this_thread::sleep_for(config.race_spacing);
  }

  outcome.upload_response = upload.get();
  return outcome;
}

ScanResult scan(const ScanConfig& config) {
  auto parsed = http::parse_url(config.upload_url);

  Rng rng = config.seed ? Rng(*config.seed) : Rng::from_env_or_random();
  payloads::ExecMarker marker = payloads::make_marker(rng);
  payloads::XssProbe probe;
  mutations::ArtifactSet artifacts = mutations::build_artifact_set(marker, config.policy);

  // The malicious baseline: the form a browser would send, file part swapped
  // for the marker script.
  http::MultipartForm baseline_form;
  http::FormPart file_part;
  file_part.name = config.form_field;
  file_part.filename = artifacts.script.suggested_name;
  file_part.declared_type = "application/octet-stream";
  file_part.content = artifacts.script.bytes;
  baseline_form.parts.push_back(std::move(file_part));
  baseline_form.parts.push_back(http::FormPart{"submit", std::nullopt, std::nullopt, "Upload"});
  baseline_form.boundary = http::generate_boundary(rng, baseline_form.parts);

  http::HttpRequest baseline;
  baseline.method = http::Method::post;
  baseline.target = parsed.target;
  baseline.set_header("Content-Type", http::multipart_content_type(baseline_form.boundary));
  baseline.body = http::serialize_multipart(baseline_form);

  auto plans = mutations::mutate_all(baseline, artifacts, config.policy);

  ScanResult result;
  Session session{parsed.endpoint, parsed.target, resolve_hint(parsed.target, config.uploads_hint),
                  Clock::now() + config.per_scenario_timeout};
  FindingSink sink{result.findings};

  // Reachability gate: any response at all will do.
  {
    http::HttpRequest ping;
    ping.method = http::Method::get;
    ping.target = parsed.target;
    ++session.requests;
    try {
      (void)http::http_roundtrip(parsed.endpoint, ping,
                                 std::min<std::chrono::milliseconds>(session.remaining(),
                                                                     std::chrono::seconds(10)));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::connection_error) {
        raise(ErrorCode::target_unreachable, "upload endpoint unreachable: " + config.upload_url);
      }
      // A timeout here still counts as reachable-but-slow; the loop's budget
      // handles it.
    }
  }

  auto probe_stored = [&](const mutations::MutationPlan& plan,
                          const http::HttpResponse& upload_response) -> bool {
    bool ce_hit = false;
    auto urls = discover_stored_url(upload_response, session.hint, plan.probe_names);
    for (const auto& url : urls) {
      if (session.expired()) break;
      auto fetched = session.fetch(url);
      if (!fetched) continue;
      if (plan.has_marker && verify_ce(fetched->body, marker)) {
        Evidence evidence{request_excerpt(plan.request, session.endpoint.authority()),
                          fetched->status, marker.token};
        sink.add(Verdict::ce, plan.technique, session.url_for(url), std::move(evidence));
        ce_hit = true;
        break;
      }
      if (verify_xss(*fetched, probe)) {
        Evidence evidence{request_excerpt(plan.request, session.endpoint.authority()),
                          fetched->status, probe.payload};
        sink.add(Verdict::xss, plan.technique, session.url_for(url), std::move(evidence));
        if (!plan.has_marker) break;
      }
    }
    return ce_hit;
  };

  auto record_upload_verdicts = [&](const mutations::MutationPlan& plan,
                                    const http::HttpResponse& response) -> bool {
    bool accepted = is_acceptance(response);
    if (accepted) {
      Evidence evidence{request_excerpt(plan.request, session.endpoint.authority()),
                        response.status, acceptance_excerpt(response)};
      sink.add(Verdict::ifub, plan.technique, config.upload_url, std::move(evidence));
    }
    if (verify_xss(response, probe)) {
      Evidence evidence{request_excerpt(plan.request, session.endpoint.authority()),
                        response.status, probe.payload};
      sink.add(Verdict::xss, plan.technique, config.upload_url, std::move(evidence));
    }
    return accepted;
  };

  mutations::Technique ce_stopped = mutations::Technique::none;
  bool ce_stop_active = false;
  for (const auto& plan : plans) {
    if (session.expired()) break;
    if (ce_stop_active && plan.technique == ce_stopped) continue;

    if (plan.race) {
      if (config.race_burst <= 0) continue;
      bool raced = false;
      for (int attempt = 0; attempt < kRaceAttempts && !raced; ++attempt) {
        if (session.expired()) break;
        RaceOutcome outcome = race_exploit(config, plan, marker, probe);
        session.requests += outcome.requests_sent;
        bool upload_accepted = false;
        if (outcome.upload_response) {
          upload_accepted = record_upload_verdicts(plan, *outcome.upload_response);
        }
        if (outcome.finding) {
          raced = true;
          bool is_ce = outcome.finding->verdict == Verdict::ce;
          if (!sink.seen(outcome.finding->verdict, plan.technique)) {
            result.findings.push_back(std::move(*outcome.finding));
          }
          if (is_ce) {
            ce_stopped = plan.technique;
            ce_stop_active = true;
          }
        } else if (outcome.upload_response && !upload_accepted) {
          break; // the validator said no; repeating the race cannot help
        }
      }
      continue;
    }

    auto response = session.exchange(plan.request);
    if (!response) continue;
    bool accepted = record_upload_verdicts(plan, *response);
    if (!accepted) continue;

    const mutations::MutationPlan* probe_plan = &plan;
    if (plan.companion) {
      if (session.expired()) break;
      auto companion_response = session.exchange(plan.companion->request);
      if (!companion_response) continue;
      if (!record_upload_verdicts(*plan.companion, *companion_response)) continue;
      probe_plan = plan.companion.get();
      response = std::move(companion_response);
    }

    if (probe_stored(*probe_plan, *response)) {
      ce_stopped = plan.technique;
      ce_stop_active = true;
    }
  }

  result.timed_out = session.timed_out;
  result.requests_sent = session.requests;
  return result;
}

} // namespace ufu::scanner
