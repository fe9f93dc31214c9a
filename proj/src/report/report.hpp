#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scanner/scanner.hpp"

namespace ufu::report {

enum class Aspect { ifub, ce, xss };
inline constexpr std::array<Aspect, 3> all_aspects{Aspect::ifub, Aspect::ce, Aspect::xss};

const char* aspect_name(Aspect aspect);

enum class Cell { found, not_found, not_applicable, timeout };

const char* cell_name(Cell cell);
std::optional<Cell> cell_from_name(std::string_view name);

// "✓" / "x" / "-" / "T", matching the usual capability-table legend.
const char* cell_symbol(Cell cell);

struct CellRecord {
  Cell value = Cell::not_found;
  std::string evidence_json; // serialized finding backing a `found` cell, may be empty
};

struct EvalMatrix {
  static constexpr int scenarios = 15;
  // rows: iFUB, CE, XSS; columns: S1..S15
  std::array<std::array<CellRecord, scenarios>, 3> cells{};

  CellRecord& at(Aspect aspect, int scenario); // scenario 1..15
  const CellRecord& at(Aspect aspect, int scenario) const;
};

// One scenario's column from its scan result: found when a finding of the
// aspect exists, (CE, S13) pinned to not_applicable, timeout when the scan
// ran out of budget before finding anything for the aspect.
void classify_into(EvalMatrix& matrix, int scenario, const scanner::ScanResult& result);

// The reference pattern: every aspect found for S1..S14 (CE not applicable
// for S13), nothing found for S15.
EvalMatrix expected_matrix();
bool matches_expected(const EvalMatrix& matrix);

std::string render_table(const EvalMatrix& matrix);

// One JSON record per (aspect, scenario) cell, 45 lines, evidence embedded
// with raw request/response excerpts hex-encoded.
std::string render_json_lines(const EvalMatrix& matrix);

// Inverse of render_json_lines; re-rendering a parsed matrix reproduces the
// table byte-identically.
EvalMatrix parse_json_lines(std::string_view jsonl);

enum class Format { table, json_lines };
std::string render(const EvalMatrix& matrix, Format format);

std::string findings_json_lines(const std::vector<scanner::Finding>& findings);
std::string finding_json(const scanner::Finding& finding);

struct EvalConfig {
  std::optional<std::string> lab_url; // nullopt: run against an embedded lab
  std::chrono::milliseconds per_scenario_timeout{300 * 1000};
  int race_burst = 20;
  std::chrono::milliseconds race_spacing{25};
  std::optional<std::uint64_t> seed;
  std::chrono::milliseconds lab_response_delay{0}; // embedded-lab test hook
};

struct EvalOutcome {
  EvalMatrix matrix;
  bool matches = false;
};

// Scans S1..S15 consecutively (reset, then scan, then classify), one scenario
// at a time. Throws ErrorCode::lab_startup_failure when no lab can be
// reached or started.
EvalOutcome run_eval(const EvalConfig& config);

} // namespace ufu::report
