#include "proofsmith/access_analysis.hpp"

#include "proofsmith/text.hpp"

#include <cctype>
#include <stdexcept>

namespace proofsmith {

namespace {

void add_ids(const std::string &expr, std::set<std::string> &out) {
  if (expr.empty())
    return;
  for (const auto &id : extract_identifiers(expr))
    out.insert(id);
}

// `&mut x` call arguments count as writes.
void add_mut_ref_args(const std::string &arg, std::set<std::string> &writes) {
  size_t pos = 0;
  while ((pos = arg.find("&mut", pos)) != std::string::npos) {
    size_t i = pos + 4;
    while (i < arg.size() && std::isspace(static_cast<unsigned char>(arg[i])))
      i++;
    size_t b = i;
    while (i < arg.size() &&
           (std::isalnum(static_cast<unsigned char>(arg[i])) || arg[i] == '_'))
      i++;
    if (i > b)
      writes.insert(arg.substr(b, i - b));
    pos = i;
  }
}

void walk(const Stmt &s, AccessSets &acc, std::set<std::string> &locals) {
  switch (s.kind) {
  case Stmt::Kind::Let:
    add_ids(s.expr, acc.reads);
    locals.insert(s.name);
    break;
  case Stmt::Kind::Assign:
    acc.writes.insert(s.target);
    add_ids(s.expr, acc.reads);
    break;
  case Stmt::Kind::MethodCall:
    if (is_mutating_method(s.method))
      acc.writes.insert(s.receiver);
    for (const auto &a : s.args) {
      add_ids(a, acc.reads);
      add_mut_ref_args(a, acc.writes);
    }
    break;
  case Stmt::Kind::While:
    add_ids(s.expr, acc.reads);
    for (const auto &b : s.body)
      walk(b, acc, locals);
    break;
  case Stmt::Kind::If:
    add_ids(s.expr, acc.reads);
    for (const auto &b : s.body)
      walk(b, acc, locals);
    for (const auto &b : s.else_body)
      walk(b, acc, locals);
    break;
  case Stmt::Kind::Assert:
  case Stmt::Kind::Assume:
  case Stmt::Kind::Expr:
    add_ids(s.expr, acc.reads);
    break;
  case Stmt::Kind::Proof:
    for (const auto &b : s.body)
      walk(b, acc, locals);
    break;
  }
}

} // namespace

AccessSets loop_access_sets(const Stmt &while_stmt) {
  if (while_stmt.kind != Stmt::Kind::While)
    throw std::invalid_argument("loop_access_sets: not a while statement");
  AccessSets acc;
  std::set<std::string> locals;
  add_ids(while_stmt.expr, acc.reads);
  for (const auto &b : while_stmt.body)
    walk(b, acc, locals);
  for (const auto &l : locals) {
    acc.reads.erase(l);
    acc.writes.erase(l);
  }
  return acc;
}

std::vector<SpecExpr> propagate_invariants(const std::vector<SpecExpr> &preconditions,
                                           const AccessSets &acc) {
  std::vector<SpecExpr> out;
  std::set<std::string> seen;
  for (const auto &clause : preconditions) {
    bool writes_clean = true;
    bool reads_some = false;
    for (const auto &id : clause.identifiers) {
      if (acc.writes.count(id))
        writes_clean = false;
      if (acc.reads.count(id))
        reads_some = true;
    }
    if (!writes_clean || !reads_some)
      continue;
    std::string key = normalize_ws(clause.raw_text);
    if (!seen.insert(key).second)
      continue;
    out.push_back(clause);
  }
  return out;
}

} // namespace proofsmith
