#include "report/report.hpp"

#include <json.hpp>

#include "common/error.hpp"
#include "common/strings.hpp"
#include "http/client.hpp"
#include "lab/lab.hpp"

namespace ufu::report {

namespace {

using nlohmann::json;

json finding_to_json(const scanner::Finding& finding) {
  return json{{"verdict", scanner::verdict_name(finding.verdict)},
              {"technique", mutations::technique_name(finding.technique)},
              {"proof_url", finding.proof_url},
              {"status", finding.evidence.response_status},
              {"request_hex", str::hex_encode(finding.evidence.request_excerpt)},
              {"excerpt_hex", str::hex_encode(finding.evidence.matched_excerpt)},
              {"timestamp_ms", finding.timestamp_ms}};
}

Aspect aspect_for_verdict(scanner::Verdict verdict) {
  switch (verdict) {
    case scanner::Verdict::ifub: return Aspect::ifub;
    case scanner::Verdict::ce: return Aspect::ce;
    case scanner::Verdict::xss: return Aspect::xss;
  }
  return Aspect::ifub;
}

} // namespace

const char* aspect_name(Aspect aspect) {
  switch (aspect) {
    case Aspect::ifub: return "iFUB";
    case Aspect::ce: return "CE";
    case Aspect::xss: return "XSS";
  }
  return "unknown";
}

const char* cell_name(Cell cell) {
  switch (cell) {
    case Cell::found: return "found";
    case Cell::not_found: return "not_found";
    case Cell::not_applicable: return "not_applicable";
    case Cell::timeout: return "timeout";
  }
  return "unknown";
}

std::optional<Cell> cell_from_name(std::string_view name) {
  if (name == "found") return Cell::found;
  if (name == "not_found") return Cell::not_found;
  if (name == "not_applicable") return Cell::not_applicable;
  if (name == "timeout") return Cell::timeout;
  return std::nullopt;
}

const char* cell_symbol(Cell cell) {
  switch (cell) {
    case Cell::found: return "✓";
    case Cell::not_found: return "x";
    case Cell::not_applicable: return "-";
    case Cell::timeout: return "T";
  }
  return "?";
}

CellRecord& EvalMatrix::at(Aspect aspect, int scenario) {
  return cells[static_cast<size_t>(aspect)][static_cast<size_t>(scenario - 1)];
}

const CellRecord& EvalMatrix::at(Aspect aspect, int scenario) const {
  return cells[static_cast<size_t>(aspect)][static_cast<size_t>(scenario - 1)];
}

void classify_into(EvalMatrix& matrix, int scenario, const scanner::ScanResult& result) {
  for (Aspect aspect : all_aspects) {
    CellRecord& cell = matrix.at(aspect, scenario);
    if (aspect == Aspect::ce && scenario == 13) {
      cell.value = Cell::not_applicable;
      continue;
    }
    const scanner::Finding* hit = nullptr;
    for (const auto& finding : result.findings) {
      if (aspect_for_verdict(finding.verdict) == aspect) {
        hit = &finding;
        break;
      }
    }
    if (hit) {
      cell.value = Cell::found;
      cell.evidence_json = finding_to_json(*hit).dump();
    } else {
      cell.value = result.timed_out ? Cell::timeout : Cell::not_found;
    }
  }
}

EvalMatrix expected_matrix() {
  EvalMatrix m;
  for (Aspect aspect : all_aspects) {
    for (int scenario = 1; scenario <= EvalMatrix::scenarios; ++scenario) {
      Cell value = Cell::found;
      if (scenario == 15) value = Cell::not_found;
      if (aspect == Aspect::ce && scenario == 13) value = Cell::not_applicable;
      m.at(aspect, scenario).value = value;
    }
  }
  return m;
}

bool matches_expected(const EvalMatrix& matrix) {
  EvalMatrix want = expected_matrix();
  for (Aspect aspect : all_aspects) {
    for (int scenario = 1; scenario <= EvalMatrix::scenarios; ++scenario) {
      if (matrix.at(aspect, scenario).value != want.at(aspect, scenario).value) return false;
    }
  }
  return true;
}

std::string render_table(const EvalMatrix& matrix) {
  std::string out = "      ";
  for (int scenario = 1; scenario <= EvalMatrix::scenarios; ++scenario) {
    std::string label = "S" + std::to_string(scenario);
    out += label;
    out.append(4 - label.size(), ' ');
  }
  out += "\n";
  for (Aspect aspect : all_aspects) {
    std::string label = aspect_name(aspect);
    out += label;
    out.append(6 - label.size(), ' ');
    for (int scenario = 1; scenario <= EvalMatrix::scenarios; ++scenario) {
      const char* symbol = cell_symbol(matrix.at(aspect, scenario).value);
      out += symbol;
      // the check mark is three bytes but one column
      out.append(4 - 1, ' ');
    }
    out += "\n";
  }
  out += "legend: ✓ found   x not found   - not applicable   T timeout\n";
  return out;
}

std::string render_json_lines(const EvalMatrix& matrix) {
  std::string out;
  for (Aspect aspect : all_aspects) {
    for (int scenario = 1; scenario <= EvalMatrix::scenarios; ++scenario) {
      const CellRecord& cell = matrix.at(aspect, scenario);
      json record{{"aspect", aspect_name(aspect)},
                  {"scenario", "S" + std::to_string(scenario)},
                  {"cell", cell_name(cell.value)}};
      if (!cell.evidence_json.empty()) {
        record["evidence"] = json::parse(cell.evidence_json);
      }
      out += record.dump();
      out += "\n";
    }
  }
  return out;
}

EvalMatrix parse_json_lines(std::string_view jsonl) {
  EvalMatrix matrix;
  size_t pos = 0;
  while (pos < jsonl.size()) {
    size_t eol = jsonl.find('\n', pos);
    std::string_view line = eol == std::string_view::npos ? jsonl.substr(pos)
                                                          : jsonl.substr(pos, eol - pos);
    pos = eol == std::string_view::npos ? jsonl.size() : eol + 1;
    if (str::trim(line).empty()) continue;

    json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (record.is_discarded()) raise(ErrorCode::invalid_argument, "bad matrix JSON line");

    std::string aspect_str = record.value("aspect", "");
    std::string scenario_str = record.value("scenario", "");
    auto cell = cell_from_name(record.value("cell", ""));
    if (!cell || scenario_str.size() < 2 || scenario_str[0] != 'S') {
      raise(ErrorCode::invalid_argument, "bad matrix record");
    }
    int scenario = std::atoi(scenario_str.c_str() + 1);
    if (scenario < 1 || scenario > EvalMatrix::scenarios) {
      raise(ErrorCode::invalid_argument, "scenario out of range");
    }
    std::optional<Aspect> aspect;
    for (Aspect a : all_aspects) {
      if (aspect_str == aspect_name(a)) aspect = a;
    }
    if (!aspect) raise(ErrorCode::invalid_argument, "unknown aspect");

    CellRecord& slot = matrix.at(*aspect, scenario);
    slot.value = *cell;
    if (record.contains("evidence")) slot.evidence_json = record["evidence"].dump();
  }
  return matrix;
}

std::string render(const EvalMatrix& matrix, Format format) {
  return format == Format::table ? render_table(matrix) : render_json_lines(matrix);
}

std::string finding_json(const scanner::Finding& finding) { return finding_to_json(finding).dump(); }

std::string findings_json_lines(const std::vector<scanner::Finding>& findings) {
  std::string out;
  for (const auto& finding : findings) {
    out += finding_json(finding);
    out += "\n";
  }
  return out;
}

EvalOutcome run_eval(const EvalConfig& config) {
  std::unique_ptr<lab::LabServer> embedded;
  std::string base;
  if (config.lab_url) {
    base = *config.lab_url;
    while (!base.empty() && base.back() == '/') base.pop_back();
  } else {
    try {
      embedded = std::make_unique<lab::LabServer>(
          lab::LabServerOptions{"127.0.0.1", 0, false, config.lab_response_delay});
    } catch (const Error& e) {
      raise(ErrorCode::lab_startup_failure, std::string("embedded lab: ") + e.what());
    }
    base = embedded->base_url();
  }

  EvalOutcome outcome;
  for (int scenario = 1; scenario <= EvalMatrix::scenarios; ++scenario) {
    std::string prefix = base + "/s" + std::to_string(scenario);

    // Reset first: consecutive runs must not inherit state (S7's .htaccess,
    // S14's survivors).
    try {
      auto reset_url = http::parse_url(prefix + "/reset");
      http::HttpRequest reset;
      reset.method = http::Method::post;
      reset.target = reset_url.target;
      (void)http::http_roundtrip(reset_url.endpoint, reset, std::chrono::seconds(10));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::connection_error) {
        raise(ErrorCode::lab_startup_failure, "lab unreachable at " + base);
      }
      // timeouts fall through; the scan budget decides
    }

    scanner::ScanConfig scan_config;
    scan_config.upload_url = prefix + "/upload";
    scan_config.per_scenario_timeout = config.per_scenario_timeout;
    scan_config.race_burst = config.race_burst;
    scan_config.race_spacing = config.race_spacing;
    if (config.seed) {
      scan_config.seed = *config.seed + static_cast<std::uint64_t>(scenario) * 1000003ULL;
    }

    scanner::ScanResult result;
    try {
      result = scanner::scan(scan_config);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::target_unreachable) {
        raise(ErrorCode::lab_startup_failure, "scenario endpoint unreachable: " + prefix);
      }
      throw;
    }
    classify_into(outcome.matrix, scenario, result);
  }
  outcome.matches = matches_expected(outcome.matrix);
  return outcome;
}

} // namespace ufu::report
