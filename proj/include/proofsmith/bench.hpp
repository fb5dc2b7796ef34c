#ifndef PROOFSMITH_BENCH_HPP
#define PROOFSMITH_BENCH_HPP

#include "proofsmith/config.hpp"
#include "proofsmith/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace proofsmith {

// Corpus harness plus the two-table report: outcome categories per segment
// and proof lines-of-code accounting.

struct ManifestEntry {
  std::string name; // program file stem
  std::string program_path;
  std::optional<std::string> ground_truth_path;
  std::optional<std::string> stub_script_path;
  std::optional<std::string> transcript_path;
};

struct CorpusManifest {
  std::string path;
  std::vector<ManifestEntry> entries;
};

// TOML subset: [[entry]] tables with string keys program, ground_truth,
// stub_script, transcript. Paths are relative to the manifest file; every
// referenced file must exist.
CorpusManifest load_manifest(const std::string &path);

// Added lines of the annotated fixture relative to the unannotated program.
int count_ground_truth_lines(const std::string &unannotated,
                             const std::string &annotated);

struct SegmentReportRow {
  int id = 0;
  SegmentKind kind = SegmentKind::LoopFree;
  OutcomeKind outcome = OutcomeKind::Unverified;
  int llm_calls = 0;
  int format_retries = 0;
  int repair_attempts = 0;
  int human_lines_changed = 0;
  std::optional<CorrectionClass> correction_class;
  std::string note;
};

struct ProgramReportRow {
  std::string name;
  std::string status = "ok"; // ok | parse_error | error
  std::string error;
  std::vector<SegmentReportRow> segments;
  int interface_llm_calls = 0;
  int interface_format_retries = 0;
  int interface_edits = 0;
  int llm_calls_total = 0;
  long long wall_ms = 0;
  std::optional<int> ground_truth_proof_lines;
};

struct RunTotals {
  int programs = 0;
  int total_segments = 0;
  int no_proof_needed = 0;
  int direct_verified = 0;
  int after_propagation = 0;
  int after_feedback = 0;
  int after_both = 0;
  int after_human = 0;
  int unverified = 0;
  int llm_calls = 0;
  int category_sum() const {
    return no_proof_needed + direct_verified + after_propagation +
           after_feedback + after_both + after_human + unverified;
  }
};

struct LocTotals {
  std::optional<int> ground_truth_proof_lines;
  int human_syntax_lines = 0;
  int human_semantics_lines = 0;
  int human_both_lines = 0;
};

struct RunReport {
  int schema_version = 1;
  std::string started;
  std::string finished;
  nlohmann::ordered_json config_snapshot;
  std::vector<ProgramReportRow> programs;
  RunTotals totals;
  LocTotals loc;
};

RunTotals compute_totals(const std::vector<ProgramReportRow> &programs);
LocTotals compute_loc(const std::vector<ProgramReportRow> &programs);

nlohmann::ordered_json config_snapshot(const ToolConfig &cfg,
                                       const std::string &manifest_path);

SegmentReportRow segment_row(const SegmentResult &r);
ProgramReportRow program_row(const ProgramReport &r);

// Runs every manifest entry through the pipeline; per-entry failures are
// recorded and the run continues.
RunReport run_bench(const CorpusManifest &manifest, const ToolConfig &cfg);

enum class ReportFormat { Markdown, Json };

nlohmann::ordered_json report_to_json(const RunReport &report);
RunReport report_from_json(const nlohmann::ordered_json &j);
std::string render_report(const RunReport &report, ReportFormat format);

} // namespace proofsmith

#endif
