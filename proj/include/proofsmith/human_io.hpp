#ifndef PROOFSMITH_HUMAN_IO_HPP
#define PROOFSMITH_HUMAN_IO_HPP

#include "proofsmith/source_model.hpp"
#include "proofsmith/verifier_driver.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace proofsmith {

// Developer-in-the-loop hooks: optional edits of model-proposed interface
// clauses, and proof completion when automation is exhausted. Scripted
// implementations keep tests and benches non-interactive.

enum class CorrectionClass { Syntax, Semantics, Both };

std::string correction_class_name(CorrectionClass c);
std::optional<CorrectionClass> correction_class_from_name(const std::string &s);

struct HumanEdit {
  std::string text;
  CorrectionClass correction_class = CorrectionClass::Semantics;
};

class HumanIo {
public:
  virtual ~HumanIo() = default;

  // Optional replacement for the clauses proposed at an internal boundary;
  // nullopt keeps the proposal. Replacement text is used verbatim.
  virtual std::optional<std::string>
  edit_interface(const std::string &program, int boundary_id,
                 const std::string &proposed_clauses) = 0;

  // Interface text when the model never produced a parseable reply.
  virtual std::optional<std::string>
  provide_interface(const std::string &program, int boundary_id) = 0;

  // Complete a proof the pipeline gave up on; nullopt leaves the segment
  // unverified.
  virtual std::optional<HumanEdit>
  complete_proof(const std::string &program, int segment_id,
                 const std::string &best_candidate,
                 const std::vector<Diagnostic> &diagnostics) = 0;
};

// Never edits, never completes: exhausted segments stay unverified.
class NonInteractiveHumanIo : public HumanIo {
public:
  std::optional<std::string> edit_interface(const std::string &, int,
                                            const std::string &) override {
    return std::nullopt;
  }
  std::optional<std::string> provide_interface(const std::string &,
                                               int) override {
    return std::nullopt;
  }
  std::optional<HumanEdit> complete_proof(const std::string &, int,
                                          const std::string &,
                                          const std::vector<Diagnostic> &) override {
    return std::nullopt;
  }
};

// Ordered records from a JSON file; each record matches a boundary or a
// segment of one program and is consumed at most once.
class ScriptedHumanIo : public HumanIo {
public:
  ScriptedHumanIo() = default;
  ScriptedHumanIo(ScriptedHumanIo &&o) noexcept
      : records_(std::move(o.records_)) {}
  static ScriptedHumanIo from_file(const std::string &path);
  static ScriptedHumanIo from_json_text(const std::string &json_text,
                                        const std::string &origin);

  std::optional<std::string> edit_interface(const std::string &program,
                                            int boundary_id,
                                            const std::string &proposed) override;
  std::optional<std::string> provide_interface(const std::string &program,
                                               int boundary_id) override;
  std::optional<HumanEdit> complete_proof(const std::string &program,
                                          int segment_id,
                                          const std::string &best,
                                          const std::vector<Diagnostic> &) override;

private:
  struct Record {
    std::optional<std::string> program;
    bool is_boundary = false;
    int id = 0;
    std::string text;
    CorrectionClass correction_class = CorrectionClass::Semantics;
    bool consumed = false;
  };
  std::vector<Record> records_;
  std::mutex mutex_; // records are consumed from concurrent bench workers
  Record *find(const std::string &program, bool boundary, int id);
};

// Writes the candidate to a temp file, launches the configured editor and
// reads the file back on exit.
class EditorHumanIo : public HumanIo {
public:
  explicit EditorHumanIo(std::string editor_cmd);
  std::optional<std::string> edit_interface(const std::string &program,
                                            int boundary_id,
                                            const std::string &proposed) override;
  std::optional<std::string> provide_interface(const std::string &program,
                                               int boundary_id) override;
  std::optional<HumanEdit> complete_proof(const std::string &program,
                                          int segment_id,
                                          const std::string &best,
                                          const std::vector<Diagnostic> &diags) override;

private:
  std::string editor_cmd_;
  std::optional<std::string> edit_text(const std::string &initial,
                                       const std::string &header);
};

} // namespace proofsmith

#endif
