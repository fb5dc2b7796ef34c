#include "proofsmith/access_analysis.hpp"
#include "proofsmith/bench.hpp"
#include "proofsmith/config.hpp"
#include "proofsmith/pipeline.hpp"
#include "proofsmith/text.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

using namespace proofsmith;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIncomplete = 1;
constexpr int kExitUsage = 2;

void collect_loops(const std::vector<Stmt> &stmts, int &counter,
                   std::vector<std::pair<int, const Stmt *>> &out) {
  for (const auto &s : stmts) {
    if (s.kind == Stmt::Kind::While) {
      out.emplace_back(counter++, &s);
      collect_loops(s.body, counter, out);
    } else if (s.kind == Stmt::Kind::If) {
      collect_loops(s.body, counter, out);
      collect_loops(s.else_body, counter, out);
    }
  }
}

int cmd_segment(const std::string &file, const ToolConfig &cfg) {
  FunctionAst fn = parse_function(read_file(file));
  SegmentPlan plan = segment_function(fn, cfg.granularity_value());
  std::cout << "plan: " << file << " granularity=" << cfg.granularity
            << " segments=" << plan.segments.size() << "\n";
  for (const auto &seg : plan.segments) {
    std::cout << "segment " << seg.id << ": kind="
              << (seg.kind == SegmentKind::Loop ? "loop" : "loop_free")
              << " stmts=" << seg.stmts.size();
    if (!seg.live_vars.empty()) {
      std::cout << " live=";
      for (size_t i = 0; i < seg.live_vars.size(); i++) {
        std::cout << seg.live_vars[i].name;
        if (i + 1 < seg.live_vars.size())
          std::cout << ",";
      }
    }
    std::cout << "\n";
  }
  return kExitOk;
}

int cmd_analyze(const std::string &file, const ToolConfig &) {
  FunctionAst fn = parse_function(read_file(file));
  std::vector<std::pair<int, const Stmt *>> loops;
  int counter = 0;
  collect_loops(fn.body, counter, loops);
  if (loops.empty()) {
    std::cout << "no loops\n";
    return kExitOk;
  }
  for (const auto &[id, loop] : loops) {
    AccessSets acc = loop_access_sets(*loop);
    std::cout << "loop " << id << " (line " << loop->start_line << "):\n";
    std::cout << "reads:\n";
    for (const auto &r : acc.reads)
      std::cout << "  " << r << "\n";
    std::cout << "writes:\n";
    for (const auto &w : acc.writes)
      std::cout << "  " << w << "\n";
    std::cout << "propagated:\n";
    for (const auto &c : propagate_invariants(fn.requires_clauses, acc))
      std::cout << "  " << c.raw_text << "\n";
  }
  return kExitOk;
}

int cmd_prove(const std::string &file, const ToolConfig &cfg,
              const std::string &out_path, bool print_final) {
  validate_config(cfg);
  std::shared_ptr<CompletionBackend> backend = make_backend(cfg);
  std::unique_ptr<Verifier> verifier = make_verifier(cfg);
  std::unique_ptr<HumanIo> human = make_human_io(cfg);

  PipelineOptions opts;
  opts.policy = cfg.attempt_policy();
  opts.propagate_eagerly = cfg.propagate_eagerly;
  opts.granularity = cfg.granularity_value();
  opts.program_name = std::filesystem::path(file).stem().string();
  opts.max_prompt_chars = static_cast<size_t>(cfg.max_prompt_chars);
  load_examples_into(opts, cfg);

  PipelineDeps deps{*backend, *verifier, *human};
  ProgramReport report = prove_program(opts.program_name, read_file(file),
                                       deps, opts, cfg.hermetic());

  if (report.status != "ok") {
    std::cerr << "error: " << report.error << "\n";
    return kExitIncomplete;
  }
  int verified = 0;
  for (const auto &seg : report.segments) {
    std::cout << "segment " << seg.segment_id << " ["
              << (seg.segment_kind == SegmentKind::Loop ? "loop" : "loop_free")
              << "]: " << outcome_kind_name(seg.outcome.kind)
              << " (llm_calls=" << seg.outcome.llm_calls;
    if (seg.outcome.human_lines_changed > 0)
      std::cout << ", human_lines=" << seg.outcome.human_lines_changed;
    std::cout << ")\n";
    if (!seg.note.empty())
      std::cout << "  note: " << seg.note << "\n";
    if (seg.outcome.kind != OutcomeKind::Unverified)
      verified++;
    if (print_final && !seg.final_text.empty())
      std::cout << seg.final_text << "\n";
  }
  std::cout << "result: verified=" << verified << "/" << report.segments.size()
            << " llm_calls=" << report.total_llm_calls() << "\n";

  if (!out_path.empty()) {
    RunReport run;
    bool hermetic = cfg.hermetic();
    run.started = hermetic ? "1970-01-01T00:00:00Z" : iso8601_now();
    run.finished = run.started;
    run.config_snapshot = config_snapshot(cfg, "");
    run.programs.push_back(program_row(report));
    run.totals = compute_totals(run.programs);
    run.loc = compute_loc(run.programs);
    write_file_atomic(out_path, render_report(run, ReportFormat::Json));
  }
  return report.all_verified() ? kExitOk : kExitIncomplete;
}

int cmd_bench(const std::string &manifest_path, const ToolConfig &cfg,
              const std::string &out_path, const std::string &format) {
  CorpusManifest manifest = load_manifest(manifest_path);
  RunReport report = run_bench(manifest, cfg);
  ReportFormat fmt =
      format == "json" ? ReportFormat::Json : ReportFormat::Markdown;
  std::string rendered = render_report(report, fmt);
  if (out_path.empty())
    std::cout << rendered;
  else
    write_file_atomic(out_path, rendered);
  return kExitOk;
}

int cmd_report(const std::string &file, const std::string &format) {
  RunReport report =
      report_from_json(nlohmann::ordered_json::parse(read_file(file)));
  ReportFormat fmt =
      format == "json" ? ReportFormat::Json : ReportFormat::Markdown;
  std::cout << render_report(report, fmt);
  return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"proof-annotation synthesis for loop-manipulating programs"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "key = value configuration file");

  std::string in_file, manifest_path, out_path, format = "markdown";
  std::string granularity, backend, verifier_kind;
  int max_repairs = -1, jobs = -1;
  bool propagate_eagerly = false, non_interactive = false, print_final = false;

  auto add_common = [&](CLI::App *cmd) {
    cmd->add_option("--granularity", granularity, "fine or coarse")
        ->check(CLI::IsMember({"fine", "coarse"}));
    cmd->add_option("--backend", backend, "live, replay or mock")
        ->check(CLI::IsMember({"live", "replay", "mock"}));
    cmd->add_option("--verifier", verifier_kind, "real or stub")
        ->check(CLI::IsMember({"real", "stub"}));
    cmd->add_option("--max-repairs", max_repairs,
                    "error-feedback attempts per segment");
    cmd->add_flag("--propagate-eagerly", propagate_eagerly,
                  "apply invariant propagation before the first verify");
    cmd->add_flag("--non-interactive", non_interactive,
                  "never launch an editor; exhausted segments stay "
                  "unverified");
  };

  CLI::App *seg = app.add_subcommand("segment", "print the segment plan");
  seg->add_option("file", in_file, "program file")->required();
  add_common(seg);

  CLI::App *ana = app.add_subcommand(
      "analyze", "print per-loop read/write sets and propagated clauses");
  ana->add_option("file", in_file, "program file")->required();

  CLI::App *prv = app.add_subcommand("prove", "prove one program");
  prv->add_option("file", in_file, "program file")->required();
  prv->add_option("--out", out_path, "write a JSON report here");
  prv->add_flag("--print-final", print_final,
                "print each segment's final program");
  add_common(prv);

  CLI::App *ben = app.add_subcommand("bench", "run a corpus manifest");
  ben->add_option("--manifest", manifest_path, "corpus manifest")->required();
  ben->add_option("--out", out_path, "write the report here");
  ben->add_option("--format", format, "markdown or json")
      ->check(CLI::IsMember({"markdown", "json"}));
  ben->add_option("--jobs", jobs, "programs proved concurrently");
  add_common(ben);

  CLI::App *rep = app.add_subcommand("report", "re-render a JSON report");
  rep->add_option("file", in_file, "JSON report file")->required();
  rep->add_option("--format", format, "markdown or json")
      ->check(CLI::IsMember({"markdown", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    ToolConfig cfg;
    if (!config_path.empty())
      apply_config_file(cfg, config_path);
    // flags override file values
    auto was_set = [&](CLI::App *cmd, const std::string &name) {
      return cmd->count(name) > 0;
    };
    CLI::App *active = app.get_subcommands().front();
    if (active->get_option_no_throw("--granularity") &&
        was_set(active, "--granularity"))
      cfg.granularity = granularity;
    if (active->get_option_no_throw("--backend") &&
        was_set(active, "--backend"))
      cfg.backend = backend;
    if (active->get_option_no_throw("--verifier") &&
        was_set(active, "--verifier"))
      cfg.verifier = verifier_kind;
    if (active->get_option_no_throw("--max-repairs") &&
        was_set(active, "--max-repairs"))
      cfg.max_repairs = max_repairs;
    if (active->get_option_no_throw("--propagate-eagerly") &&
        was_set(active, "--propagate-eagerly"))
      cfg.propagate_eagerly = true;
    if (active->get_option_no_throw("--non-interactive") &&
        was_set(active, "--non-interactive"))
      cfg.non_interactive = true;
    if (active->get_option_no_throw("--jobs") && was_set(active, "--jobs"))
      cfg.jobs = jobs;

    if (seg->parsed())
      return cmd_segment(in_file, cfg);
    if (ana->parsed())
      return cmd_analyze(in_file, cfg);
    if (prv->parsed())
      return cmd_prove(in_file, cfg, out_path, print_final);
    if (ben->parsed())
      return cmd_bench(manifest_path, cfg, out_path, format);
    if (rep->parsed())
      return cmd_report(in_file, format);
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError &e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIncomplete;
  }
  return kExitUsage;
}
