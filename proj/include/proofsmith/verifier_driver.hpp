#ifndef PROOFSMITH_VERIFIER_DRIVER_HPP
#define PROOFSMITH_VERIFIER_DRIVER_HPP

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace proofsmith {

// Runs the external verifier on a candidate program and turns its output
// into structured diagnostics. A scripted stub verifier keeps tests and
// benchmark runs hermetic.

enum class DiagnosticKind {
  InvariantNotSatisfiedAtEnd,
  InvariantNotSatisfiedBeforeLoop,
  PostconditionFailed,
  AssertFailed,
  ArithmeticOverflow,
  SyntaxOrType,
  Other,
};

std::string diagnostic_kind_name(DiagnosticKind kind);
std::optional<DiagnosticKind> diagnostic_kind_from_name(const std::string &s);

struct Diagnostic {
  DiagnosticKind kind = DiagnosticKind::Other;
  std::string message;
  std::optional<int> line;
  std::optional<std::string> snippet;
};

enum class VerifyStatus { Verified, Failed, Crashed };

struct VerifyResult {
  VerifyStatus status = VerifyStatus::Crashed;
  std::vector<Diagnostic> diagnostics; // nonempty when Failed
  std::string exit_info;               // Crashed: what happened
  std::string raw_output;

  static VerifyResult verified() { return {VerifyStatus::Verified, {}, "", ""}; }
};

// Best-effort keyword classification of verifier output; unmatched errors
// become Other with the full message, order preserved. Never throws.
std::vector<Diagnostic> parse_diagnostics(const std::string &raw_output);

// One line per diagnostic, message text verbatim.
std::string format_diagnostics(const std::vector<Diagnostic> &diags);

struct ExecutableNotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StubScriptMiss : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Verifier {
public:
  virtual ~Verifier() = default;
  virtual VerifyResult verify(const std::string &program_text) = 0;
};

struct RealVerifierConfig {
  std::string command; // invoked as: <command> <file>
  int timeout_seconds = 60;
  std::string workdir; // temp files go here; empty = system temp
};

class RealVerifier : public Verifier {
public:
  explicit RealVerifier(RealVerifierConfig cfg);
  VerifyResult verify(const std::string &program_text) override;

private:
  RealVerifierConfig cfg_;
};

// Hash of the whitespace-normalized, blank-line-free program text; the key
// stub scripts match on.
std::string normalized_program_hash(const std::string &program_text);

// Scripted verifier. Entries match by exact normalized-program hash first,
// then by `contains` patterns (every pattern a substring of the normalized
// text), then a default entry. A program no entry matches is a script bug
// and throws StubScriptMiss.
class StubVerifier : public Verifier {
public:
  static StubVerifier from_file(const std::string &path);
  static StubVerifier from_json_text(const std::string &json_text,
                                     const std::string &origin);
  VerifyResult verify(const std::string &program_text) override;

private:
  struct Entry {
    std::optional<std::string> program_hash;
    std::vector<std::string> contains;
    bool is_default = false;
    VerifyResult result;
  };
  std::vector<Entry> entries_;
  std::string origin_;
};

} // namespace proofsmith

#endif
