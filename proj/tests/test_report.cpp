#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "report/report.hpp"

using namespace ufu;
using namespace ufu::report;

namespace {

scanner::Finding sample_finding(scanner::Verdict verdict) {
  scanner::Finding finding;
  finding.verdict = verdict;
  finding.technique = mutations::Technique::mime_spoof;
  finding.proof_url = "http://127.0.0.1:1/s1/uploads/exploit.php";
  finding.evidence. request_excerpt = std::string("POST /s1/upload\r\n\x00raw", 20);
  finding.evidence.response_status = 200;
  finding.evidence.matched_excerpt = "tok0tok1tok2tok3";
  finding.timestamp_ms = 1722470400000;
  return finding;
}

} // namespace

TEST_CASE("classification: findings map to rows, S13 CE stays not applicable") {
  EvalMatrix matrix;
  scanner::ScanResult result;
  result.findings.push_back(sample_finding(scanner::Verdict::ifub));
  result.findings.push_back(sample_finding(scanner::Verdict::ce));
  classify_into(matrix, 1, result);
  CHECK(matrix.at(Aspect::ifub, 1).value == Cell::found);
  CHECK(matrix.at(Aspect::ce, 1).value == Cell::found);
  CHECK(matrix.at(Aspect::xss, 1).value == Cell::not_found);
  CHECK_FALSE(matrix.at(Aspect::ce, 1).evidence_json.empty());

  scanner::ScanResult s13;
  s13.findings.push_back(sample_finding(scanner::Verdict::ce)); // must be ignored
  classify_into(matrix, 13, s13);
  CHECK(matrix.at(Aspect::ce, 13).value == Cell::not_applicable);

  scanner::ScanResult slow;
  slow.timed_out = true;
  slow.findings.push_back(sample_finding(scanner::Verdict::ifub));
  classify_into(matrix, 5, slow);
  CHECK(matrix.at(Aspect::ifub, 5).value == Cell::found); // partial results count
  CHECK(matrix.at(Aspect::ce, 5).value == Cell::timeout);
  CHECK(matrix.at(Aspect::xss, 5).value == Cell::timeout);
}

TEST_CASE("expected pattern: S1-S14 found, CE/S13 dash, S15 empty") {
  EvalMatrix want = expected_matrix();
  CHECK(want.at(Aspect::ifub, 1).value == Cell::found);
  CHECK(want.at(Aspect::ce, 13).value == Cell::not_applicable);
  CHECK(want.at(Aspect::xss, 13).value == Cell::found);
  CHECK(want.at(Aspect::ifub, 15).value == Cell::not_found);
  CHECK(want.at(Aspect::ce, 15).value == Cell::not_found);
  CHECK(want.at(Aspect::xss, 15).value == Cell::not_found);
  CHECK(matches_expected(want));

  EvalMatrix off = expected_matrix();
  off.at(Aspect::ce, 14).value = Cell::not_found;
  CHECK_FALSE(matches_expected(off));
}

TEST_CASE("cell symbols match the table legend") {
  CHECK(std::string(cell_symbol(Cell::found)) == "✓");
  CHECK(std::string(cell_symbol(Cell::not_found)) == "x");
  CHECK(std::string(cell_symbol(Cell::not_applicable)) == "-");
  CHECK(std::string(cell_symbol(Cell::timeout)) == "T");
}

TEST_CASE("render: table carries all 15 columns and three rows") {
  EvalMatrix matrix = expected_matrix();
  std::string table = render_table(matrix);
  CHECK(table.find("S1") != std::string::npos);
  CHECK(table.find("S15") != std::string::npos);
  CHECK(table.find("iFUB") != std::string::npos);
  CHECK(table.find("CE") != std::string::npos);
  CHECK(table.find("XSS") != std::string::npos);
  CHECK(table.find("-") != std::string::npos); // the CE/S13 cell
  CHECK(table.find("legend:") != std::string::npos);

  EvalMatrix slow;
  for (Aspect a : all_aspects) {
    for (int s = 1; s <= 15; ++s) slow.at(a, s).value = Cell::timeout;
  }
  CHECK(render_table(slow).find("T") != std::string::npos);
}

TEST_CASE("json-lines report holds exactly 45 records") {
  EvalMatrix matrix = expected_matrix();
  std::string jsonl = render_json_lines(matrix);
  size_t lines = 0;
  for (char c : jsonl) {
    if (c == '\n') ++lines;
  }
  CHECK(lines == 45);
}

TEST_CASE("re-rendering from persisted json-lines reproduces the table byte-identically") {
  EvalMatrix matrix;
  scanner::ScanResult result;
  result.findings.push_back(sample_finding(scanner::Verdict::ifub));
  result.findings.push_back(sample_finding(scanner::Verdict::ce));
  result.findings.push_back(sample_finding(scanner::Verdict::xss));
  for (int scenario = 1; scenario <= 15; ++scenario) {
    classify_into(matrix, scenario, scenario == 15 ? scanner::ScanResult{} : result);
  }

  std::string jsonl = render_json_lines(matrix);
  EvalMatrix back = parse_json_lines(jsonl);
  CHECK(render_table(back) == render_table(matrix));
  CHECK(render_json_lines(back) == jsonl);
}

TEST_CASE("findings serialize with hex-encoded raw bytes") {
  auto finding = sample_finding(scanner::Verdict::ce);
  std::string line = finding_json(finding);
  CHECK(line.find("\"verdict\":\"CE\"") != std::string::npos);
  CHECK(line.find("\"technique\":\"mime_spoof\"") != std::string::npos);
  // the NUL byte in the request excerpt survives as hex
  CHECK(line.find("00") != std::string::npos);
  CHECK(line.find("excerpt_hex") != std::string::npos);
}
