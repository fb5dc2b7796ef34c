#include "proofsmith/pipeline.hpp"

#include "proofsmith/access_analysis.hpp"
#include "proofsmith/text.hpp"

#include <chrono>

namespace proofsmith {

std::string outcome_kind_name(OutcomeKind k) {
  switch (k) {
  case OutcomeKind::NoProofNeeded:
    return "no_proof_needed";
  case OutcomeKind::DirectVerified:
    return "direct_verified";
  case OutcomeKind::AfterPropagation:
    return "after_propagation";
  case OutcomeKind::AfterFeedback:
    return "after_feedback";
  case OutcomeKind::AfterBoth:
    return "after_both";
  case OutcomeKind::AfterHuman:
    return "after_human";
  case OutcomeKind::Unverified:
    return "unverified";
  }
  return "unverified";
}

std::optional<OutcomeKind> outcome_kind_from_name(const std::string &s) {
  static const std::pair<const char *, OutcomeKind> table[] = {
      {"no_proof_needed", OutcomeKind::NoProofNeeded},
      {"direct_verified", OutcomeKind::DirectVerified},
      {"after_propagation", OutcomeKind::AfterPropagation},
      {"after_feedback", OutcomeKind::AfterFeedback},
      {"after_both", OutcomeKind::AfterBoth},
      {"after_human", OutcomeKind::AfterHuman},
      {"unverified", OutcomeKind::Unverified},
  };
  for (const auto &[name, kind] : table)
    if (s == name)
      return kind;
  return std::nullopt;
}

namespace {

std::vector<Diagnostic> crash_diags(const VerifyResult &r) {
  Diagnostic d;
  d.kind = DiagnosticKind::Other;
  d.message = "verifier crashed: " + r.exit_info;
  return {d};
}

std::vector<Diagnostic> diags_of(const VerifyResult &r) {
  if (r.status == VerifyStatus::Crashed)
    return crash_diags(r);
  return r.diagnostics;
}

// Clauses known to hold at segment entry: the resolved entry interface
// followed by the sub-program's surviving requires clauses.
std::vector<SpecExpr> loop_preconditions(const SegmentPlan &plan, int seg_id,
                                         const FunctionAst &sub) {
  std::vector<SpecExpr> pre;
  std::set<std::string> seen;
  auto push = [&](const SpecExpr &c) {
    if (seen.insert(normalize_ws(c.raw_text)).second)
      pre.push_back(c);
  };
  if (plan.entry_interface(seg_id))
    for (const auto &c : *plan.entry_interface(seg_id))
      push(c);
  for (const auto &c : sub.requires_clauses)
    push(c);
  return pre;
}

const Stmt *find_loop(const std::vector<Stmt> &stmts, int &counter,
                      int loop_id) {
  for (const auto &s : stmts) {
    if (s.kind == Stmt::Kind::While) {
      if (counter == loop_id)
        return &s;
      counter++;
      if (const Stmt *hit = find_loop(s.body, counter, loop_id))
        return hit;
    } else if (s.kind == Stmt::Kind::If) {
      if (const Stmt *hit = find_loop(s.body, counter, loop_id))
        return hit;
      if (const Stmt *hit = find_loop(s.else_body, counter, loop_id))
        return hit;
    }
  }
  return nullptr;
}

struct PropagationOutcome {
  std::string text;
  bool changed = false;
  bool parse_failed = false;
};

// Re-parse the candidate, append the propagated preconditions to every
// top-level loop's invariant list, and re-print. An unparseable candidate is
// left as-is; the verifier diagnostics speak for it.
PropagationOutcome apply_propagation(const std::string &candidate,
                                     const std::vector<SpecExpr> &preconds) {
  PropagationOutcome out;
  out.text = candidate;
  FunctionAst ast;
  try {
    ast = parse_function(candidate);
  } catch (const ParseError &) {
    out.parse_failed = true;
    return out;
  }
  for (int loop_id : top_level_loop_ids(ast)) {
    int counter = 0;
    const Stmt *loop = find_loop(ast.body, counter, loop_id);
    if (!loop)
      continue;
    AccessSets acc = loop_access_sets(*loop);
    std::vector<SpecExpr> propagated = propagate_invariants(preconds, acc);
    if (propagated.empty())
      continue;
    ast = merge_invariants(ast, loop_id, loop->invariants, propagated);
  }
  std::string merged = print_function(ast);
  if (normalize_program(merged) != normalize_program(candidate)) {
    out.text = merged;
    out.changed = true;
  }
  return out;
}

struct CandidateEval {
  bool verified = false;
  bool used_propagation = false;
  std::string final_text;          // when verified
  std::string best_text;           // last text sent to the verifier
  std::vector<Diagnostic> diagnostics;
};

class SegmentProver {
public:
  SegmentProver(const SegmentPlan &plan, int seg_id, PipelineDeps deps,
                const PipelineOptions &opts)
      : plan_(plan), seg_id_(seg_id), deps_(deps), opts_(opts),
        format_budget_(opts.policy.max_format_retries) {}

  SegmentResult run() {
    result_.segment_id = seg_id_;
    result_.segment_kind = plan_.segments[seg_id_].kind;

    FunctionAst sub = build_subprogram(plan_, seg_id_);
    result_.subprogram_text = print_function(sub);
    preconds_ = loop_preconditions(plan_, seg_id_, sub);

    VerifyResult as_is = checked_verify(result_.subprogram_text);
    if (as_is.status == VerifyStatus::Verified) {
      finish(OutcomeKind::NoProofNeeded, result_.subprogram_text);
      return result_;
    }

    auto reply = ask(PromptKind::Proof, nullptr);
    if (!reply) {
      human_fallback(result_.subprogram_text, diags_of(as_is),
                     "model never returned a parseable proof reply");
      return result_;
    }

    CandidateEval ev = evaluate(reply->payload);
    if (ev.verified) {
      finish(ev.used_propagation ? OutcomeKind::AfterPropagation
                                 : OutcomeKind::DirectVerified,
             ev.final_text);
      return result_;
    }

    while (result_.repair_attempts < opts_.policy.max_repair_attempts) {
      result_.repair_attempts++;
      RepairExtras extras{ev.best_text, ev.diagnostics};
      auto fix = ask(PromptKind::Repair, &extras);
      if (!fix) {
        human_fallback(ev.best_text, ev.diagnostics,
                       "model never returned a parseable repair reply");
        return result_;
      }
      ev = evaluate(fix->payload);
      if (ev.verified) {
        finish(ev.used_propagation ? OutcomeKind::AfterBoth
                                   : OutcomeKind::AfterFeedback,
               ev.final_text);
        return result_;
      }
    }
    human_fallback(ev.best_text, ev.diagnostics, "repair attempts exhausted");
    return result_;
  }

private:
  const SegmentPlan &plan_;
  int seg_id_;
  PipelineDeps deps_;
  const PipelineOptions &opts_;
  SegmentResult result_;
  std::vector<SpecExpr> preconds_;
  int format_budget_;
  int proof_attempts_ = 0, repair_calls_ = 0;

  void finish(OutcomeKind kind, std::string final_text) {
    result_.outcome.kind = kind;
    result_.final_text = std::move(final_text);
  }

  // Every candidate must satisfy the additive contract before it reaches
  // the verifier; callers check it first, this is the backstop.
  VerifyResult checked_verify(const std::string &text) {
    AdditiveResult av = validate_additive(result_.subprogram_text, text);
    if (!av.ok)
      throw PipelineError("internal: candidate sent to verifier violates the "
                          "additive contract at line " +
                          std::to_string(av.violation_line));
    return deps_.verifier.verify(text);
  }

  std::optional<LlmReply> ask(PromptKind kind, const RepairExtras *extras) {
    const auto &examples = kind == PromptKind::Proof ? opts_.proof_examples
                                                     : opts_.repair_examples;
    std::string prompt =
        render_prompt(kind, result_.subprogram_text, examples, extras);
    if (opts_.max_prompt_chars && prompt.size() > opts_.max_prompt_chars)
      throw PipelineError("prompt exceeds max_prompt_chars (" +
                          std::to_string(prompt.size()) + " > " +
                          std::to_string(opts_.max_prompt_chars) + ")");
    double temperature = opts_.policy.base_temperature;
    for (;;) {
      CompletionRequest req;
      req.prompt = prompt;
      req.kind = kind;
      req.program = opts_.program_name;
      req.segment_id = seg_id_;
      req.attempt =
          kind == PromptKind::Proof ? proof_attempts_++ : repair_calls_++;
      req.temperature = temperature;
      std::string raw = deps_.backend.complete(req);
      result_.exchanges.push_back({kind, prompt, raw, temperature});
      result_.outcome.llm_calls++;
      auto parsed = parse_reply(raw, kind);
      if (auto *reply = std::get_if<LlmReply>(&parsed))
        return *reply;
      if (format_budget_ == 0)
        return std::nullopt;
      format_budget_--;
      result_.format_retries++;
      temperature = opts_.policy.escalated_temperature;
    }
  }

  CandidateEval evaluate(const std::string &candidate) {
    CandidateEval ev;
    AdditiveResult av = validate_additive(result_.subprogram_text, candidate);
    if (!av.ok) {
      Diagnostic d;
      d.kind = DiagnosticKind::Other;
      d.message = "modified or removed existing line " +
                  std::to_string(av.violation_line) + " (\"" +
                  av.violation_text + "\"); only adding lines is allowed";
      ev.diagnostics = {d};
      ev.best_text = candidate;
      return ev;
    }
    if (opts_.propagate_eagerly) {
      PropagationOutcome prop = apply_propagation(candidate, preconds_);
      VerifyResult r = checked_verify(prop.text);
      ev.best_text = prop.text;
      if (r.status == VerifyStatus::Verified) {
        ev.verified = true;
        ev.used_propagation = prop.changed;
        ev.final_text = prop.text;
        return ev;
      }
      ev.diagnostics = diags_of(r);
      return ev;
    }
    VerifyResult r = checked_verify(candidate);
    ev.best_text = candidate;
    if (r.status == VerifyStatus::Verified) {
      ev.verified = true;
      ev.final_text = candidate;
      return ev;
    }
    PropagationOutcome prop = apply_propagation(candidate, preconds_);
    if (prop.changed) {
      VerifyResult r2 = checked_verify(prop.text);
      ev.best_text = prop.text;
      if (r2.status == VerifyStatus::Verified) {
        ev.verified = true;
        ev.used_propagation = true;
        ev.final_text = prop.text;
        return ev;
      }
      ev.diagnostics = diags_of(r2);
      return ev;
    }
    ev.diagnostics = diags_of(r);
    return ev;
  }

  void human_fallback(const std::string &best,
                      const std::vector<Diagnostic> &diags,
                      const std::string &why) {
    auto edit = deps_.human.complete_proof(opts_.program_name, seg_id_, best,
                                           diags);
    if (!edit) {
      result_.outcome.kind = OutcomeKind::Unverified;
      result_.note = why + "; no human correction available";
      return;
    }
    AdditiveResult av = validate_additive(result_.subprogram_text, edit->text);
    if (!av.ok) {
      result_.outcome.kind = OutcomeKind::Unverified;
      result_.note = "human edit modified or removed line " +
                     std::to_string(av.violation_line) +
                     " of the sub-program; only adding lines is allowed";
      return;
    }
    VerifyResult r = checked_verify(edit->text);
    if (r.status != VerifyStatus::Verified) {
      result_.outcome.kind = OutcomeKind::Unverified;
      result_.note = why + "; human correction did not verify";
      return;
    }
    LineDiff d = diff_lines(best, edit->text);
    result_.outcome.kind = OutcomeKind::AfterHuman;
    result_.outcome.human_lines_changed = d.added + d.removed;
    result_.outcome.correction_class = edit->correction_class;
    result_.final_text = edit->text;
  }
};

} // namespace

SegmentResult prove_segment(const SegmentPlan &plan, int seg_id,
                            PipelineDeps deps, const PipelineOptions &opts) {
  SegmentProver prover(plan, seg_id, deps, opts);
  return prover.run();
}

InterfaceResolution resolve_interfaces(SegmentPlan &plan, PipelineDeps deps,
                                       const PipelineOptions &opts) {
  InterfaceResolution res;
  int nsegs = static_cast<int>(plan.segments.size());
  for (int b = 0; b + 1 < nsegs; b++) {
    if (plan.boundaries[b + 1])
      continue;
    std::string prefix = print_function(build_prefix_program(plan, b));
    std::string prompt = render_prompt(PromptKind::Postcondition, prefix,
                                       opts.postcondition_examples);
    if (opts.max_prompt_chars && prompt.size() > opts.max_prompt_chars)
      throw PipelineError("prompt exceeds max_prompt_chars");
    int budget = opts.policy.max_format_retries;
    double temperature = opts.policy.base_temperature;
    int attempt = 0;
    std::optional<std::string> clause_text;
    for (;;) {
      CompletionRequest req;
      req.prompt = prompt;
      req.kind = PromptKind::Postcondition;
      req.program = opts.program_name;
      req.segment_id = b;
      req.attempt = attempt++;
      req.temperature = temperature;
      std::string raw = deps.backend.complete(req);
      res.exchanges.push_back({PromptKind::Postcondition, prompt, raw,
                               temperature});
      res.llm_calls++;
      auto parsed = parse_reply(raw, PromptKind::Postcondition);
      if (auto *reply = std::get_if<LlmReply>(&parsed)) {
        clause_text = reply->payload;
        break;
      }
      if (budget == 0)
        break;
      budget--;
      res.format_retries++;
      temperature = opts.policy.escalated_temperature;
    }
    if (!clause_text) {
      auto manual = deps.human.provide_interface(opts.program_name, b);
      if (!manual)
        throw PipelineError("boundary " + std::to_string(b) +
                            ": model never returned a parseable "
                            "postcondition and no human input is available");
      clause_text = *manual;
      res.edited_boundaries++;
    } else if (auto edited = deps.human.edit_interface(opts.program_name, b,
                                                       *clause_text)) {
      clause_text = *edited;
      res.edited_boundaries++;
    }
    plan.boundaries[b + 1] = payload_clauses(*clause_text);
  }
  return res;
}

int ProgramReport::total_llm_calls() const {
  int n = interface_llm_calls;
  for (const auto &s : segments)
    n += s.outcome.llm_calls;
  return n;
}

bool ProgramReport::all_verified() const {
  if (status != "ok")
    return false;
  for (const auto &s : segments)
    if (s.outcome.kind == OutcomeKind::Unverified)
      return false;
  return true;
}

ProgramReport prove_program(const std::string &name,
                            const std::string &source_text, PipelineDeps deps,
                            const PipelineOptions &opts,
                            bool deterministic_timing) {
  ProgramReport report;
  report.name = name;
  auto t0 = std::chrono::steady_clock::now();

  FunctionAst ast;
  try {
    ast = parse_function(source_text);
  } catch (const ParseError &e) {
    report.status = "parse_error";
    report.error = e.what();
    return report;
  }
  SegmentPlan plan = segment_function(ast, opts.granularity);
  InterfaceResolution ir = resolve_interfaces(plan, deps, opts);
  report.interface_llm_calls = ir.llm_calls;
  report.interface_format_retries = ir.format_retries;
  report.interface_edits = ir.edited_boundaries;
  for (int k = 0; k < static_cast<int>(plan.segments.size()); k++)
    report.segments.push_back(prove_segment(plan, k, deps, opts));

  if (!deterministic_timing) {
    auto t1 = std::chrono::steady_clock::now();
    report.wall_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  }
  return report;
}

} // namespace proofsmith
