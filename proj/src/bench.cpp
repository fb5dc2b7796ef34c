#include "proofsmith/bench.hpp"

#include "proofsmith/text.hpp"

#include <atomic>
#include <filesystem>
#include <thread>

namespace proofsmith {

using nlohmann::ordered_json;

CorpusManifest load_manifest(const std::string &path) {
  namespace fs = std::filesystem;
  CorpusManifest manifest;
  manifest.path = path;
  fs::path dir = fs::path(path).parent_path();

  std::string text = read_file(path);
  std::optional<ManifestEntry> cur;
  int line_no = 0;
  auto flush = [&]() {
    if (!cur)
      return;
    if (cur->program_path.empty())
      throw ConfigError(path + ": [[entry]] without program key");
    manifest.entries.push_back(std::move(*cur));
    cur.reset();
  };
  for (const auto &raw : split_lines(text)) {
    line_no++;
    std::string line = raw;
    size_t hash = line.find('#');
    if (hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty())
      continue;
    if (line == "[[entry]]") {
      flush();
      cur = ManifestEntry{};
      continue;
    }
    size_t eq = line.find('=');
    if (!cur || eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected [[entry]] or key = \"value\"");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() < 2 || value.front() != '"' || value.back() != '"')
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": value must be a quoted string");
    value = value.substr(1, value.size() - 2);
    std::string resolved = (dir / value).lexically_normal().string();
    if (key == "program")
      cur->program_path = resolved;
    else if (key == "ground_truth")
      cur->ground_truth_path = resolved;
    else if (key == "stub_script")
      cur->stub_script_path = resolved;
    else if (key == "transcript")
      cur->transcript_path = resolved;
    else
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": unknown manifest key " + key);
  }
  flush();
  for (auto &e : manifest.entries) {
    e.name = fs::path(e.program_path).stem().string();
    for (const std::string *p :
         {&e.program_path, e.ground_truth_path ? &*e.ground_truth_path : nullptr,
          e.stub_script_path ? &*e.stub_script_path : nullptr,
          e.transcript_path ? &*e.transcript_path : nullptr}) {
      if (p && !fs::exists(*p))
        throw ConfigError(path + ": referenced file does not exist: " + *p);
    }
  }
  return manifest;
}

int count_ground_truth_lines(const std::string &unannotated,
                             const std::string &annotated) {
  return diff_lines(unannotated, annotated).added;
}

RunTotals compute_totals(const std::vector<ProgramReportRow> &programs) {
  RunTotals t;
  t.programs = static_cast<int>(programs.size());
  for (const auto &p : programs) {
    t.llm_calls += p.llm_calls_total;
    for (const auto &s : p.segments) {
      t.total_segments++;
      switch (s.outcome) {
      case OutcomeKind::NoProofNeeded:
        t.no_proof_needed++;
        break;
      case OutcomeKind::DirectVerified:
        t.direct_verified++;
        break;
      case OutcomeKind::AfterPropagation:
        t.after_propagation++;
        break;
      case OutcomeKind::AfterFeedback:
        t.after_feedback++;
        break;
      case OutcomeKind::AfterBoth:
        t.after_both++;
        break;
      case OutcomeKind::AfterHuman:
        t.after_human++;
        break;
      case OutcomeKind::Unverified:
        t.unverified++;
        break;
      }
    }
  }
  return t;
}

LocTotals compute_loc(const std::vector<ProgramReportRow> &programs) {
  LocTotals loc;
  int gt = 0;
  bool has_gt = false;
  for (const auto &p : programs) {
    if (p.ground_truth_proof_lines) {
      has_gt = true;
      gt += *p.ground_truth_proof_lines;
    }
    for (const auto &s : p.segments) {
      if (!s.correction_class)
        continue;
      switch (*s.correction_class) {
      case CorrectionClass::Syntax:
        loc.human_syntax_lines += s.human_lines_changed;
        break;
      case CorrectionClass::Semantics:
        loc.human_semantics_lines += s.human_lines_changed;
        break;
      case CorrectionClass::Both:
        loc.human_both_lines += s.human_lines_changed;
        break;
      }
    }
  }
  if (has_gt)
    loc.ground_truth_proof_lines = gt;
  return loc;
}

ordered_json config_snapshot(const ToolConfig &cfg,
                             const std::string &manifest_path) {
  ordered_json j;
  j["backend"] = cfg.backend;
  j["model"] = cfg.model;
  j["temperature"] = cfg.temperature;
  j["escalated_temperature"] = cfg.escalated_temperature;
  j["max_tokens"] = cfg.max_tokens;
  j["timeout_s"] = cfg.timeout_s;
  j["transcript_path"] = cfg.transcript_path;
  j["script_path"] = cfg.script_path;
  j["verifier"] = cfg.verifier;
  j["verifier_cmd"] = cfg.verifier_cmd;
  j["stub_script"] = cfg.stub_script;
  j["verify_timeout_s"] = cfg.verify_timeout_s;
  j["max_repairs"] = cfg.max_repairs;
  j["max_format_retries"] = cfg.max_format_retries;
  j["propagate_eagerly"] = cfg.propagate_eagerly;
  j["granularity"] = cfg.granularity;
  j["fewshot_dir"] = cfg.fewshot_dir;
  j["human_script"] = cfg.human_script;
  j["jobs"] = cfg.jobs;
  if (!manifest_path.empty())
    j["manifest"] = manifest_path;
  return j;
}

SegmentReportRow segment_row(const SegmentResult &r) {
  SegmentReportRow row;
  row.id = r.segment_id;
  row.kind = r.segment_kind;
  row.outcome = r.outcome.kind;
  row.llm_calls = r.outcome.llm_calls;
  row.format_retries = r.format_retries;
  row.repair_attempts = r.repair_attempts;
  row.human_lines_changed = r.outcome.human_lines_changed;
  row.correction_class = r.outcome.correction_class;
  row.note = r.note;
  return row;
}

ProgramReportRow program_row(const ProgramReport &r) {
  ProgramReportRow row;
  row.name = r.name;
  row.status = r.status;
  row.error = r.error;
  row.interface_llm_calls = r.interface_llm_calls;
  row.interface_format_retries = r.interface_format_retries;
  row.interface_edits = r.interface_edits;
  row.llm_calls_total = r.total_llm_calls();
  row.wall_ms = r.wall_ms;
  for (const auto &s : r.segments)
    row.segments.push_back(segment_row(s));
  return row;
}

RunReport run_bench(const CorpusManifest &manifest, const ToolConfig &cfg) {
  validate_config(cfg);
  bool hermetic = cfg.hermetic();

  RunReport report;
  report.started = hermetic ? "1970-01-01T00:00:00Z" : iso8601_now();
  report.config_snapshot = config_snapshot(cfg, manifest.path);

  std::shared_ptr<CompletionBackend> global_backend;
  if (cfg.backend != "replay" || !cfg.transcript_path.empty())
    global_backend = make_backend(cfg);
  std::unique_ptr<HumanIo> human = make_human_io(cfg);

  size_t n = manifest.entries.size();
  std::vector<ProgramReportRow> rows(n);
  std::atomic<size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= n)
        return;
      const ManifestEntry &entry = manifest.entries[i];
      ProgramReportRow row;
      row.name = entry.name;
      try {
        std::shared_ptr<CompletionBackend> backend = global_backend;
        if (cfg.backend == "replay" && entry.transcript_path) {
          backend = std::make_shared<ReplayBackend>(*entry.transcript_path,
                                                    cfg.backend_config());
        }
        if (!backend)
          throw ConfigError("replay backend needs transcript_path in the "
                            "config or per manifest entry");
        std::unique_ptr<Verifier> verifier =
            make_verifier(cfg, entry.stub_script_path);

        PipelineOptions opts;
        opts.policy = cfg.attempt_policy();
        opts.propagate_eagerly = cfg.propagate_eagerly;
        opts.granularity = cfg.granularity_value();
        opts.program_name = entry.name;
        opts.max_prompt_chars = static_cast<size_t>(cfg.max_prompt_chars);
        load_examples_into(opts, cfg);

        PipelineDeps deps{*backend, *verifier, *human};
        std::string source = read_file(entry.program_path);
        ProgramReport pr =
            prove_program(entry.name, source, deps, opts, hermetic);
        row = program_row(pr);
        if (entry.ground_truth_path)
          row.ground_truth_proof_lines = count_ground_truth_lines(
              source, read_file(*entry.ground_truth_path));
      } catch (const std::exception &e) {
        row.status = "error";
        row.error = e.what();
      }
      rows[i] = std::move(row);
    }
  };

  int jobs = std::max(1, cfg.jobs);
  if (jobs == 1 || n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(jobs, static_cast<int>(n)); t++)
      pool.emplace_back(worker);
    for (auto &t : pool)
      t.join();
  }

  report.programs = std::move(rows);
  report.totals = compute_totals(report.programs);
  report.loc = compute_loc(report.programs);
  report.finished = hermetic ? "1970-01-01T00:00:00Z" : iso8601_now();
  return report;
}

namespace {

std::string segment_kind_name(SegmentKind k) {
  return k == SegmentKind::Loop ? "loop" : "loop_free";
}

SegmentKind segment_kind_from_name(const std::string &s) {
  return s == "loop" ? SegmentKind::Loop : SegmentKind::LoopFree;
}

} // namespace

ordered_json report_to_json(const RunReport &report) {
  ordered_json j;
  j["schema_version"] = report.schema_version;
  j["started"] = report.started;
  j["finished"] = report.finished;
  j["config"] = report.config_snapshot;
  ordered_json programs = ordered_json::array();
  for (const auto &p : report.programs) {
    ordered_json pj;
    pj["name"] = p.name;
    pj["status"] = p.status;
    if (!p.error.empty())
      pj["error"] = p.error;
    ordered_json segs = ordered_json::array();
    for (const auto &s : p.segments) {
      ordered_json sj;
      sj["id"] = s.id;
      sj["kind"] = segment_kind_name(s.kind);
      sj["outcome"] = outcome_kind_name(s.outcome);
      sj["llm_calls"] = s.llm_calls;
      sj["format_retries"] = s.format_retries;
      sj["repair_attempts"] = s.repair_attempts;
      sj["human_lines_changed"] = s.human_lines_changed;
      if (s.correction_class)
        sj["correction_class"] = correction_class_name(*s.correction_class);
      if (!s.note.empty())
        sj["note"] = s.note;
      segs.push_back(std::move(sj));
    }
    pj["segments"] = std::move(segs);
    pj["interface_llm_calls"] = p.interface_llm_calls;
    pj["interface_format_retries"] = p.interface_format_retries;
    pj["interface_edits"] = p.interface_edits;
    pj["llm_calls_total"] = p.llm_calls_total;
    pj["wall_ms"] = p.wall_ms;
    if (p.ground_truth_proof_lines)
      pj["ground_truth_proof_lines"] = *p.ground_truth_proof_lines;
    programs.push_back(std::move(pj));
  }
  j["programs"] = std::move(programs);
  ordered_json tj;
  tj["programs"] = report.totals.programs;
  tj["total_segments"] = report.totals.total_segments;
  tj["no_proof_needed"] = report.totals.no_proof_needed;
  tj["direct_verified"] = report.totals.direct_verified;
  tj["after_propagation"] = report.totals.after_propagation;
  tj["after_feedback"] = report.totals.after_feedback;
  tj["after_both"] = report.totals.after_both;
  tj["after_human"] = report.totals.after_human;
  tj["unverified"] = report.totals.unverified;
  tj["llm_calls"] = report.totals.llm_calls;
  j["totals"] = std::move(tj);
  ordered_json lj;
  if (report.loc.ground_truth_proof_lines)
    lj["ground_truth_proof_lines"] = *report.loc.ground_truth_proof_lines;
  else
    lj["ground_truth_proof_lines"] = nullptr;
  lj["human_syntax_lines"] = report.loc.human_syntax_lines;
  lj["human_semantics_lines"] = report.loc.human_semantics_lines;
  lj["human_both_lines"] = report.loc.human_both_lines;
  j["loc"] = std::move(lj);
  return j;
}

RunReport report_from_json(const ordered_json &j) {
  RunReport report;
  report.schema_version = j.at("schema_version").get<int>();
  report.started = j.at("started").get<std::string>();
  report.finished = j.at("finished").get<std::string>();
  report.config_snapshot = j.at("config");
  for (const auto &pj : j.at("programs")) {
    ProgramReportRow p;
    p.name = pj.at("name").get<std::string>();
    p.status = pj.at("status").get<std::string>();
    p.error = pj.value("error", "");
    for (const auto &sj : pj.at("segments")) {
      SegmentReportRow s;
      s.id = sj.at("id").get<int>();
      s.kind = segment_kind_from_name(sj.at("kind").get<std::string>());
      auto outcome = outcome_kind_from_name(sj.at("outcome").get<std::string>());
      if (!outcome)
        throw std::runtime_error("unknown outcome in report: " +
                                 sj.at("outcome").get<std::string>());
      s.outcome = *outcome;
      s.llm_calls = sj.at("llm_calls").get<int>();
      s.format_retries = sj.at("format_retries").get<int>();
      s.repair_attempts = sj.at("repair_attempts").get<int>();
      s.human_lines_changed = sj.at("human_lines_changed").get<int>();
      if (sj.contains("correction_class"))
        s.correction_class = correction_class_from_name(
            sj.at("correction_class").get<std::string>());
      s.note = sj.value("note", "");
      p.segments.push_back(std::move(s));
    }
    p.interface_llm_calls = pj.at("interface_llm_calls").get<int>();
    p.interface_format_retries = pj.at("interface_format_retries").get<int>();
    p.interface_edits = pj.at("interface_edits").get<int>();
    p.llm_calls_total = pj.at("llm_calls_total").get<int>();
    p.wall_ms = pj.at("wall_ms").get<long long>();
    if (pj.contains("ground_truth_proof_lines"))
      p.ground_truth_proof_lines = pj.at("ground_truth_proof_lines").get<int>();
    report.programs.push_back(std::move(p));
  }
  const auto &tj = j.at("totals");
  report.totals.programs = tj.at("programs").get<int>();
  report.totals.total_segments = tj.at("total_segments").get<int>();
  report.totals.no_proof_needed = tj.at("no_proof_needed").get<int>();
  report.totals.direct_verified = tj.at("direct_verified").get<int>();
  report.totals.after_propagation = tj.at("after_propagation").get<int>();
  report.totals.after_feedback = tj.at("after_feedback").get<int>();
  report.totals.after_both = tj.at("after_both").get<int>();
  report.totals.after_human = tj.at("after_human").get<int>();
  report.totals.unverified = tj.at("unverified").get<int>();
  report.totals.llm_calls = tj.at("llm_calls").get<int>();
  const auto &lj = j.at("loc");
  if (!lj.at("ground_truth_proof_lines").is_null())
    report.loc.ground_truth_proof_lines =
        lj.at("ground_truth_proof_lines").get<int>();
  report.loc.human_syntax_lines = lj.at("human_syntax_lines").get<int>();
  report.loc.human_semantics_lines = lj.at("human_semantics_lines").get<int>();
  report.loc.human_both_lines = lj.at("human_both_lines").get<int>();
  return report;
}

namespace {

std::string markdown_report(const RunReport &report) {
  std::string out;
  out += "# Verification bench report\n\n";
  out += "Started: " + report.started + "  \n";
  out += "Finished: " + report.finished + "\n\n";

  out += "## Results by program segments\n\n";
  out += "| Category | Count |\n| --- | ---: |\n";
  auto row = [&out](const std::string &label, int value) {
    out += "| " + label + " | " + std::to_string(value) + " |\n";
  };
  row("Total segments", report.totals.total_segments);
  row("No proof needed", report.totals.no_proof_needed);
  row("GPT response verified directly", report.totals.direct_verified);
  row("Verified after invariant propagation", report.totals.after_propagation);
  row("Verified after error feedback", report.totals.after_feedback);
  row("Verified after both propagation and feedback", report.totals.after_both);
  row("Verified after human correction", report.totals.after_human);
  row("Unverified", report.totals.unverified);
  out += "\n";

  out += "## Results by line of code\n\n";
  out += "| Category | Lines |\n| --- | ---: |\n";
  out += "| Ground-truth proof | " +
         (report.loc.ground_truth_proof_lines
              ? std::to_string(*report.loc.ground_truth_proof_lines)
              : std::string("n/a")) +
         " |\n";
  row("Human corrections on syntax", report.loc.human_syntax_lines);
  row("Human corrections on semantics", report.loc.human_semantics_lines);
  row("Human corrections on both syntax and semantics",
      report.loc.human_both_lines);
  out += "\n";

  out += "## Programs\n\n";
  out += "| Program | Status | Segments | LLM calls | Outcomes |\n";
  out += "| --- | --- | ---: | ---: | --- |\n";
  for (const auto &p : report.programs) {
    std::string outcomes;
    for (size_t i = 0; i < p.segments.size(); i++) {
      outcomes += outcome_kind_name(p.segments[i].outcome);
      if (i + 1 < p.segments.size())
        outcomes += ", ";
    }
    out += "| " + p.name + " | " + p.status + " | " +
           std::to_string(p.segments.size()) + " | " +
           std::to_string(p.llm_calls_total) + " | " + outcomes + " |\n";
  }
  out += "\n";
  out += "Total LLM calls: " + std::to_string(report.totals.llm_calls) + "\n";
  return out;
}

} // namespace

std::string render_report(const RunReport &report, ReportFormat format) {
  if (format == ReportFormat::Json)
    return report_to_json(report).dump(2) + "\n";
  return markdown_report(report);
}

} // namespace proofsmith
