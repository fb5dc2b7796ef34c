#ifndef PROOFSMITH_TESTS_GENERATORS_HPP
#define PROOFSMITH_TESTS_GENERATORS_HPP

// Test-only generators and independent oracles. Everything here stays out of
// the library so the implementations under test cannot share code with the
// oracles that check them.

#include "proofsmith/access_analysis.hpp"
#include "proofsmith/source_model.hpp"
#include "proofsmith/text.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace testgen {

using proofsmith::AccessSets;
using proofsmith::FunctionAst;
using proofsmith::Param;
using proofsmith::SpecExpr;
using proofsmith::Stmt;

struct Rng {
  std::mt19937 eng;
  explicit Rng(unsigned seed) : eng(seed) {}
  int range(int lo, int hi) { // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(eng);
  }
  bool chance(int percent) { return range(1, 100) <= percent; }
  template <class T> const T &pick(const std::vector<T> &v) {
    return v[static_cast<size_t>(range(0, static_cast<int>(v.size()) - 1))];
  }
};

// ---------------------------------------------------------------------------
// Reference identifier extraction: a character-level scan written
// independently of the library lexer.
inline std::set<std::string> reference_identifiers(const std::string &text) {
  static const std::set<std::string> keywords = {
      "forall", "exists", "old",   "as",    "true",  "false", "int",
      "nat",    "bool",   "usize", "isize", "u8",    "u16",   "u32",
      "u64",    "u128",   "i8",    "i16",   "i32",   "i64",   "i128",
      "Vec",    "if",     "else",  "let",   "mut",   "while", "invariant",
      "requires", "ensures", "assert", "assume", "proof", "fn"};
  struct Word {
    std::string text;
    char before; // nearest non-space char before the word ('\0' if none)
    std::string prev_word;
  };
  std::vector<Word> words;
  std::string cur, prev_word;
  char last_sig = '\0';
  auto flush = [&](void) {
    if (cur.empty())
      return;
    if (!std::isdigit(static_cast<unsigned char>(cur[0])))
      words.push_back({cur, last_sig, prev_word});
    prev_word = cur;
    last_sig = '\0';
    cur.clear();
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      cur.push_back(c);
    } else {
      flush();
      if (!std::isspace(static_cast<unsigned char>(c)))
        last_sig = c;
    }
  }
  flush();

  // quantifier binders: words between the two '|' that follow forall/exists
  std::set<std::string> bound;
  {
    bool await_bar = false, in_binder = false, await_name = false;
    std::string word;
    for (size_t i = 0; i <= text.size(); i++) {
      char c = i < text.size() ? text[i] : ' ';
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
        word.push_back(c);
        continue;
      }
      if (!word.empty()) {
        if (word == "forall" || word == "exists")
          await_bar = true;
        else if (in_binder && await_name &&
                 !std::isdigit(static_cast<unsigned char>(word[0]))) {
          bound.insert(word);
          await_name = false;
        }
        word.clear();
      }
      if (c == '|') {
        // "||" is a logical operator, not a binder delimiter
        if (i + 1 < text.size() && text[i + 1] == '|') {
          i++;
        } else if (await_bar && !in_binder) {
          in_binder = true;
          await_name = true;
          await_bar = false;
        } else if (in_binder) {
          in_binder = false;
        }
      } else if (c == ',' && in_binder) {
        await_name = true;
      }
    }
  }

  std::set<std::string> ids;
  for (const auto &w : words) {
    if (keywords.count(w.text) || bound.count(w.text))
      continue;
    if (w.before == '.')
      continue; // method or member access
    if (w.prev_word == "as")
      continue; // cast target
    ids.insert(w.text);
  }
  return ids;
}

// ---------------------------------------------------------------------------
// Brute-force access-set oracle: enumerates (role, identifier) occurrences
// one statement at a time, then folds and subtracts loop-local names.
struct AccessOccurrence {
  enum Role { Read, Write, LocalDecl } role;
  std::string name;
};

inline void enumerate_accesses(const Stmt &s,
                               std::vector<AccessOccurrence> &out) {
  auto expr_reads = [&out](const std::string &e) {
    for (const auto &id : reference_identifiers(e))
      out.push_back({AccessOccurrence::Read, id});
  };
  switch (s.kind) {
  case Stmt::Kind::Let:
    expr_reads(s.expr);
    out.push_back({AccessOccurrence::LocalDecl, s.name});
    break;
  case Stmt::Kind::Assign:
    out.push_back({AccessOccurrence::Write, s.target});
    expr_reads(s.expr);
    break;
  case Stmt::Kind::MethodCall: {
    if (proofsmith::is_mutating_method(s.method))
      out.push_back({AccessOccurrence::Write, s.receiver});
    for (const auto &a : s.args) {
      expr_reads(a);
      size_t pos = 0;
      while ((pos = a.find("&mut", pos)) != std::string::npos) {
        pos += 4;
        while (pos < a.size() && a[pos] == ' ')
          pos++;
        size_t b = pos;
        while (pos < a.size() &&
               (std::isalnum(static_cast<unsigned char>(a[pos])) ||
                a[pos] == '_'))
          pos++;
        if (pos > b)
          out.push_back({AccessOccurrence::Write, a.substr(b, pos - b)});
      }
    }
    break;
  }
  case Stmt::Kind::While:
    expr_reads(s.expr);
    for (const auto &b : s.body)
      enumerate_accesses(b, out);
    break;
  case Stmt::Kind::If:
    expr_reads(s.expr);
    for (const auto &b : s.body)
      enumerate_accesses(b, out);
    for (const auto &b : s.else_body)
      enumerate_accesses(b, out);
    break;
  case Stmt::Kind::Assert:
  case Stmt::Kind::Assume:
  case Stmt::Kind::Expr:
    expr_reads(s.expr);
    break;
  case Stmt::Kind::Proof:
    for (const auto &b : s.body)
      enumerate_accesses(b, out);
    break;
  }
}

inline AccessSets oracle_access_sets(const Stmt &while_stmt) {
  std::vector<AccessOccurrence> occ;
  for (const auto &id : reference_identifiers(while_stmt.expr))
    occ.push_back({AccessOccurrence::Read, id});
  for (const auto &b : while_stmt.body)
    enumerate_accesses(b, occ);
  std::set<std::string> locals;
  for (const auto &o : occ)
    if (o.role == AccessOccurrence::LocalDecl)
      locals.insert(o.name);
  AccessSets acc;
  for (const auto &o : occ) {
    if (locals.count(o.name))
      continue;
    if (o.role == AccessOccurrence::Read)
      acc.reads.insert(o.name);
    else if (o.role == AccessOccurrence::Write)
      acc.writes.insert(o.name);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Brute-force propagation predicate, evaluated clause by clause with plain
// set intersections.
inline std::vector<SpecExpr>
oracle_propagate(const std::vector<SpecExpr> &clauses, const AccessSets &acc) {
  std::vector<SpecExpr> out;
  std::set<std::string> seen;
  for (const auto &c : clauses) {
    std::vector<std::string> in_writes, in_reads;
    std::set_intersection(c.identifiers.begin(), c.identifiers.end(),
                          acc.writes.begin(), acc.writes.end(),
                          std::back_inserter(in_writes));
    std::set_intersection(c.identifiers.begin(), c.identifiers.end(),
                          acc.reads.begin(), acc.reads.end(),
                          std::back_inserter(in_reads));
    if (!in_writes.empty() || in_reads.empty())
      continue;
    if (!seen.insert(proofsmith::normalize_ws(c.raw_text)).second)
      continue;
    out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// LCS subsequence oracle for the additive contract.
inline bool oracle_is_subsequence(const std::string &original,
                                  const std::string &candidate) {
  std::vector<std::string> a = proofsmith::normalized_lines(original);
  std::vector<std::string> b = proofsmith::normalized_lines(candidate);
  size_t n = a.size(), m = b.size();
  std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
  for (size_t i = 1; i <= n; i++)
    for (size_t j = 1; j <= m; j++)
      dp[i][j] = a[i - 1] == b[j - 1]
                     ? dp[i - 1][j - 1] + 1
                     : std::max(dp[i - 1][j], dp[i][j - 1]);
  return dp[n][m] == static_cast<int>(n);
}

// ---------------------------------------------------------------------------
// Random subset-program generator. Produces canonical ASTs so that
// parse(print(ast)) == ast is the expected fixpoint.
struct ProgramGen {
  Rng rng;
  std::vector<std::string> vec_names;
  std::vector<std::string> scalar_names;
  int fresh = 0;

  explicit ProgramGen(unsigned seed) : rng(seed) {}

  std::string fresh_name(const char *prefix) {
    return prefix + std::to_string(fresh++);
  }

  std::string int_atom() {
    int c = rng.range(0, 3);
    if (c == 0 || scalar_names.empty())
      return std::to_string(rng.range(0, 99));
    if (c == 1 && !vec_names.empty())
      return rng.pick(vec_names) + ".len()";
    return rng.pick(scalar_names);
  }

  std::string int_expr(int depth) {
    if (depth <= 0 || rng.chance(40))
      return int_atom();
    int c = rng.range(0, 3);
    if (c == 0 && !vec_names.empty())
      return rng.pick(vec_names) + "[" + int_expr(depth - 1) + "]";
    static const std::vector<std::string> ops = {"+", "-", "*", "/"};
    return int_expr(depth - 1) + " " + rng.pick(ops) + " " +
           int_expr(depth - 1);
  }

  std::string bool_expr(int depth) {
    static const std::vector<std::string> cmps = {"<", "<=", "==", "!=", ">",
                                                  ">="};
    std::string base = int_expr(depth) + " " + rng.pick(cmps) + " " +
                       int_expr(depth);
    if (depth > 0 && rng.chance(20))
      return base + " && " + bool_expr(depth - 1);
    return base;
  }

  std::string clause_text() {
    int c = rng.range(0, 3);
    if (c == 0 && !vec_names.empty()) {
      std::string v = rng.pick(vec_names);
      return "forall |q:int| 0 <= q < " + v + ".len() ==> " + v + "[q] <= " +
             std::to_string(rng.range(0, 99));
    }
    if (c == 1 && !vec_names.empty())
      return "old(" + rng.pick(vec_names) + ").len() == " + int_atom();
    return bool_expr(1);
  }

  Stmt let_stmt(bool force_mut = false) {
    Stmt s;
    s.kind = Stmt::Kind::Let;
    s.name = fresh_name("t");
    s.is_mut = force_mut || rng.chance(60);
    if (rng.chance(50))
      s.type_text = rng.chance(50) ? "usize" : "u64";
    s.expr = int_expr(1);
    scalar_names.push_back(s.name);
    return s;
  }

  Stmt assign_stmt() {
    Stmt s;
    s.kind = Stmt::Kind::Assign;
    s.target = rng.pick(scalar_names);
    s.expr = int_expr(1);
    return s;
  }

  Stmt call_stmt() {
    Stmt s;
    s.kind = Stmt::Kind::MethodCall;
    s.receiver = rng.pick(vec_names);
    s.method = rng.chance(70) ? "set" : "push";
    if (s.method == "set")
      s.args = {int_expr(1), int_expr(1)};
    else
      s.args = {int_expr(1)};
    return s;
  }

  Stmt assert_stmt(Stmt::Kind kind) {
    Stmt s;
    s.kind = kind;
    s.expr = bool_expr(1);
    return s;
  }

  Stmt proof_stmt() {
    Stmt s;
    s.kind = Stmt::Kind::Proof;
    int n = rng.range(1, 2);
    for (int i = 0; i < n; i++)
      s.body.push_back(assert_stmt(Stmt::Kind::Assert));
    return s;
  }

  Stmt if_stmt(int depth) {
    Stmt s;
    s.kind = Stmt::Kind::If;
    s.expr = rng.chance(50) ? "(" + bool_expr(1) + ")" : bool_expr(1);
    s.body = stmt_list(depth - 1, 1, 2);
    if (rng.chance(40))
      s.else_body = stmt_list(depth - 1, 1, 2);
    return s;
  }

  Stmt while_stmt(int depth) {
    Stmt s;
    s.kind = Stmt::Kind::While;
    s.expr = rng.chance(50) ? "(" + bool_expr(1) + ")" : bool_expr(1);
    if (rng.chance(40)) {
      int n = rng.range(1, 3);
      for (int i = 0; i < n; i++) {
        SpecExpr e = SpecExpr::make(clause_text());
        if (rng.chance(25))
          e.trailing_comment = "// keep the size stable";
        s.invariants.push_back(std::move(e));
      }
    }
    s.body = stmt_list(depth - 1, 1, 3);
    return s;
  }

  std::vector<Stmt> stmt_list(int depth, int lo, int hi) {
    std::vector<Stmt> out;
    size_t scalars_before = scalar_names.size();
    int n = rng.range(lo, hi);
    for (int i = 0; i < n; i++) {
      int c = rng.range(0, 9);
      Stmt s;
      if (c <= 2 || scalar_names.empty())
        s = let_stmt();
      else if (c == 3)
        s = assign_stmt();
      else if (c == 4 && !vec_names.empty())
        s = call_stmt();
      else if (c == 5)
        s = assert_stmt(Stmt::Kind::Assert);
      else if (c == 6)
        s = assert_stmt(Stmt::Kind::Assume);
      else if (c == 7 && depth > 0)
        s = if_stmt(depth);
      else if (c == 8 && depth > 0)
        s = while_stmt(depth);
      else
        s = proof_stmt();
      if (rng.chance(15))
        s.leading_comments.push_back("// step " + std::to_string(i));
      out.push_back(std::move(s));
    }
    // inner scopes end here; names do not leak into siblings in the
    // generator's model of scope
    scalar_names.resize(scalars_before);
    return out;
  }

  FunctionAst function() {
    vec_names.clear();
    scalar_names.clear();
    fresh = 0;
    FunctionAst fn;
    fn.is_pub = rng.chance(50);
    fn.name = fresh_name("gen_fn_");
    int nv = rng.range(0, 2);
    for (int i = 0; i < nv; i++) {
      Param p;
      p.name = fresh_name("v");
      p.type_text = rng.chance(50) ? "&mut Vec<u64>" : "&mut Vec<u32>";
      p.mutable_ref = true;
      vec_names.push_back(p.name);
      fn.params.push_back(std::move(p));
    }
    int ns = rng.range(0, 2);
    for (int i = 0; i < ns; i++) {
      Param p;
      p.name = fresh_name("n");
      p.type_text = rng.chance(50) ? "u32" : "usize";
      scalar_names.push_back(p.name);
      fn.params.push_back(std::move(p));
    }
    int nr = rng.range(0, 2);
    for (int i = 0; i < nr; i++)
      fn.requires_clauses.push_back(SpecExpr::make(clause_text()));
    int ne = rng.range(0, 2);
    for (int i = 0; i < ne; i++)
      fn.ensures_clauses.push_back(SpecExpr::make(clause_text()));
    fn.body = stmt_list(2, 0, 6);
    return fn;
  }

  // A loop with reads and writes spread over nested ifs, loops and calls.
  Stmt loop_for_analysis() {
    vec_names = {"a", "b"};
    scalar_names = {"i", "j", "n", "m"};
    fresh = 0;
    return while_stmt(2);
  }
};

// Random (clauses, access-sets) instances for the propagation property.
struct PropagationCase {
  std::vector<SpecExpr> clauses;
  AccessSets acc;
};

inline PropagationCase random_propagation_case(Rng &rng) {
  static const std::vector<std::string> pool = {"a", "b", "i", "j",
                                                "n", "m", "x", "y"};
  PropagationCase pc;
  int nc = rng.range(0, 6);
  for (int c = 0; c < nc; c++) {
    int nids = rng.range(0, 3);
    std::vector<std::string> ids;
    for (int k = 0; k < nids; k++)
      ids.push_back(rng.pick(pool));
    std::string text;
    if (ids.empty()) {
      text = "true";
    } else {
      for (size_t k = 0; k < ids.size(); k++) {
        text += ids[k];
        if (k + 1 < ids.size())
          text += " + ";
      }
      text += " <= " + std::to_string(rng.range(0, 50));
    }
    // duplicate an earlier clause now and then to exercise dedup
    if (!pc.clauses.empty() && rng.chance(15))
      pc.clauses.push_back(pc.clauses[static_cast<size_t>(
          rng.range(0, static_cast<int>(pc.clauses.size()) - 1))]);
    else
      pc.clauses.push_back(SpecExpr::make(text));
  }
  for (const auto &name : pool) {
    if (rng.chance(40))
      pc.acc.reads.insert(name);
    if (rng.chance(30))
      pc.acc.writes.insert(name);
  }
  return pc;
}

} // namespace testgen

#endif
