#ifndef PROOFSMITH_SOURCE_MODEL_HPP
#define PROOFSMITH_SOURCE_MODEL_HPP

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace proofsmith {

// Parsed representation of the Verus-style subset the pipeline manipulates:
// one function with requires/ensures clauses and a body built from
// let/assign/method-call/while/if/assert/assume/proof statements. Spec
// expressions are kept as raw text plus the set of free program variables;
// the external verifier owns full semantics. Everything here is immutable
// after construction and safe to share across threads.

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string &msg)
      : std::runtime_error("line " + std::to_string(line_) + ": " + msg),
        line(line_) {}
};

struct SourceProgram {
  std::string raw_text;
  // (1-based line number, content) — joining contents with '\n' reproduces
  // raw_text.
  std::vector<std::pair<int, std::string>> lines;

  static SourceProgram from_text(std::string text);
};

// Free program variables of a single spec clause. Quantifier-bound names are
// excluded, `old(v)` contributes `v`, method names and cast targets are
// skipped. Throws ParseError on unbalanced (), [], {}.
std::set<std::string> extract_identifiers(const std::string &spec_text);

struct SpecExpr {
  std::string raw_text; // whitespace-normalized clause text
  std::set<std::string> identifiers;
  std::vector<std::string> leading_comments; // own-line comments, verbatim
  std::optional<std::string> trailing_comment;

  static SpecExpr make(const std::string &raw);

  bool operator==(const SpecExpr &o) const {
    return raw_text == o.raw_text && leading_comments == o.leading_comments &&
           trailing_comment == o.trailing_comment;
  }
};

struct Param {
  std::string name;
  std::string type_text; // opaque, e.g. "&mut Vec<u32>"
  bool mutable_ref = false;

  bool operator==(const Param &o) const {
    return name == o.name && type_text == o.type_text &&
           mutable_ref == o.mutable_ref;
  }
};

struct Stmt {
  enum class Kind { Let, Assign, MethodCall, While, If, Assert, Assume, Proof, Expr };

  Kind kind;

  std::string name;      // Let: bound name
  bool is_mut = false;   // Let: declared with `mut`
  std::string type_text; // Let: optional annotation ("" when absent)

  // Let initializer / Assign rhs / While|If condition / Assert|Assume|Expr
  // expression, whitespace-normalized raw text.
  std::string expr;

  std::string target; // Assign
  std::string receiver, method;  // MethodCall
  std::vector<std::string> args; // MethodCall

  std::vector<SpecExpr> invariants; // While
  std::vector<Stmt> body;           // While / If-then / Proof
  std::vector<Stmt> else_body;      // If

  std::vector<std::string> leading_comments;
  std::optional<std::string> trailing_comment;
  std::vector<std::string> post_comments; // block-end comments after this stmt

  int start_line = 0, end_line = 0;

  bool operator==(const Stmt &o) const;
};

struct FunctionAst {
  bool is_pub = false;
  std::string name;
  std::vector<Param> params;
  std::vector<SpecExpr> requires_clauses;
  std::vector<SpecExpr> ensures_clauses;
  std::vector<Stmt> body;
  std::vector<std::string> leading_comments; // comments before the header
  std::vector<std::string> body_comments; // comments in an otherwise empty body
  int start_line = 0, end_line = 0;

  bool operator==(const FunctionAst &o) const;
};

// Parse exactly one function in the supported subset. Unsupported constructs
// raise ParseError naming the line and construct; there is no partial parse.
FunctionAst parse_function(const SourceProgram &src);
FunctionAst parse_function(const std::string &text);

// Canonical re-emission: clauses one per line, 4-space indents. Printing then
// reparsing yields a structurally equal FunctionAst.
std::string print_function(const FunctionAst &fn);
std::string print_stmt(const Stmt &stmt, int indent);

// All identifiers referenced anywhere in a statement (reads, writes,
// receivers and spec clauses). Used for liveness.
std::set<std::string> stmt_referenced(const Stmt &stmt);

// Names a statement declares or assigns: let bindings, assignment targets,
// receivers of mutating method calls, `&mut` call arguments.
std::set<std::string> stmt_defined(const Stmt &stmt);

bool is_mutating_method(const std::string &method);

} // namespace proofsmith

#endif
