#ifndef PROOFSMITH_PIPELINE_HPP
#define PROOFSMITH_PIPELINE_HPP

#include "proofsmith/human_io.hpp"
#include "proofsmith/llm_backend.hpp"
#include "proofsmith/prompting.hpp"
#include "proofsmith/segmenter.hpp"
#include "proofsmith/verifier_driver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace proofsmith {

// Per-segment proof loop: try the sub-program as-is, ask for a proof,
// re-apply precondition propagation, feed verifier errors back a bounded
// number of times, then hand off to a human.

struct AttemptPolicy {
  int max_repair_attempts = 1; // error-feedback retries per segment
  double base_temperature = 0.0;
  double escalated_temperature = 0.5; // after a malformed reply
  int max_format_retries = 1;         // malformed-reply retries per segment
};

enum class OutcomeKind {
  NoProofNeeded,
  DirectVerified,
  AfterPropagation,
  AfterFeedback,
  AfterBoth,
  AfterHuman,
  Unverified,
};

std::string outcome_kind_name(OutcomeKind k);
std::optional<OutcomeKind> outcome_kind_from_name(const std::string &s);

struct SegmentOutcome {
  OutcomeKind kind = OutcomeKind::Unverified;
  int llm_calls = 0;
  int human_lines_changed = 0;
  std::optional<CorrectionClass> correction_class;
};

struct Exchange {
  PromptKind kind = PromptKind::Proof;
  std::string prompt;
  std::string reply;
  double temperature = 0.0;
};

struct SegmentResult {
  int segment_id = 0;
  SegmentKind segment_kind = SegmentKind::LoopFree;
  SegmentOutcome outcome;
  std::string subprogram_text;
  std::string final_text; // verified text unless Unverified
  std::vector<Exchange> exchanges;
  int format_retries = 0;
  int repair_attempts = 0;
  std::string note; // why the segment ended up unverified
};

struct PipelineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PipelineDeps {
  CompletionBackend &backend;
  Verifier &verifier;
  HumanIo &human;
};

struct PipelineOptions {
  AttemptPolicy policy;
  bool propagate_eagerly = false;
  Granularity granularity = Granularity::Fine;
  std::string program_name; // stem used by mock backends and human scripts
  std::vector<FewshotExample> postcondition_examples;
  std::vector<FewshotExample> proof_examples;
  std::vector<FewshotExample> repair_examples;
  size_t max_prompt_chars = 0; // 0 = unlimited
};

SegmentResult prove_segment(const SegmentPlan &plan, int seg_id,
                            PipelineDeps deps, const PipelineOptions &opts);

struct InterfaceResolution {
  int llm_calls = 0;
  int format_retries = 0;
  int edited_boundaries = 0;
  std::vector<Exchange> exchanges;
};

// Fills every internal boundary by querying for the postcondition of the
// prefix program, with the developer given the chance to edit each proposal.
InterfaceResolution resolve_interfaces(SegmentPlan &plan, PipelineDeps deps,
                                       const PipelineOptions &opts);

struct ProgramReport {
  std::string name;
  std::string status = "ok"; // ok | parse_error
  std::string error;
  std::vector<SegmentResult> segments;
  int interface_llm_calls = 0;
  int interface_format_retries = 0;
  int interface_edits = 0;
  long long wall_ms = 0;

  int total_llm_calls() const;
  bool all_verified() const;
};

// Parse, segment, resolve interfaces, prove each segment in order. Parse
// errors abort the program with status parse_error; backend and verifier
// faults propagate to the caller.
ProgramReport prove_program(const std::string &name,
                            const std::string &source_text, PipelineDeps deps,
                            const PipelineOptions &opts,
                            bool deterministic_timing = false);

} // namespace proofsmith

#endif
