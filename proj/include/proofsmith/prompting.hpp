#ifndef PROOFSMITH_PROMPTING_HPP
#define PROOFSMITH_PROMPTING_HPP

#include "proofsmith/source_model.hpp"
#include "proofsmith/verifier_driver.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace proofsmith {

// The three prompt templates, reply parsing, the additive-only contract and
// the invariant merge step.

enum class PromptKind { Postcondition, Proof, Repair };

std::string prompt_kind_name(PromptKind kind);

struct FewshotExample {
  std::string name;
  std::string input;  // <name>.input
  std::string answer; // <name>.answer
};

// Loads paired <name>.input / <name>.answer files from dir/<kind name>/,
// sorted by name. Missing directory yields an empty list; an unpaired file
// is an error.
std::vector<FewshotExample> load_fewshot_examples(const std::string &dir,
                                                  PromptKind kind);

struct RepairExtras {
  std::string previous_program;
  std::vector<Diagnostic> diagnostics;
};

struct MissingExtras : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Expected string fields of the reply object.
std::vector<std::string> response_schema(PromptKind kind);

// Deterministic: identical inputs produce identical bytes.
std::string render_prompt(PromptKind kind, const std::string &subprogram,
                          const std::vector<FewshotExample> &examples,
                          const RepairExtras *extras = nullptr);

struct LlmReply {
  std::string thoughts;
  std::string payload; // postcondition clauses or a full program
};

struct FormatError {
  std::string reason;
};

// Extracts the first balanced {...} object, requires every schema field to
// be a nonempty string. Surrounding prose is tolerated.
std::variant<LlmReply, FormatError> parse_reply(const std::string &raw,
                                                PromptKind kind);

std::string serialize_reply(const LlmReply &reply, PromptKind kind);

// Splits a postcondition payload into clauses, one per line; trailing commas
// and blank lines dropped.
std::vector<SpecExpr> payload_clauses(const std::string &payload);

struct AdditiveResult {
  bool ok = true;
  int violation_line = 0; // 1-based line in the original text
  std::string violation_text;
};

// Ok iff the whitespace-normalized nonempty line sequence of `original` is a
// subsequence of `candidate`'s; otherwise names the first original line not
// found in order.
AdditiveResult validate_additive(const std::string &original,
                                 const std::string &candidate);

struct UnknownLoop : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Replaces the invariant list of the loop_id-th While (pre-order over all
// loops) with gpt_clauses followed by propagated clauses, deduplicated by
// normalized text. Everything else is untouched.
FunctionAst merge_invariants(const FunctionAst &program, int loop_id,
                             const std::vector<SpecExpr> &gpt_clauses,
                             const std::vector<SpecExpr> &propagated);

// Pre-order indices of the top-level loops of a function body.
std::vector<int> top_level_loop_ids(const FunctionAst &fn);

} // namespace proofsmith

#endif
