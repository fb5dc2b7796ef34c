#include "proofsmith/segmenter.hpp"

#include "proofsmith/text.hpp"

#include <map>

namespace proofsmith {

namespace {

struct DeclInfo {
  std::string type_text;
  bool is_mut = false;
};

// Top-level let bindings with their annotations. Unannotated bindings
// default to usize: in this vector-manipulating subset they are indices,
// lengths or element copies used as indices.
std::map<std::string, DeclInfo> top_level_decls(const FunctionAst &fn) {
  std::map<std::string, DeclInfo> decls;
  for (const auto &s : fn.body)
    if (s.kind == Stmt::Kind::Let)
      decls[s.name] = {s.type_text.empty() ? "usize" : s.type_text, s.is_mut};
  return decls;
}

std::set<std::string> segment_referenced(const Segment &seg) {
  std::set<std::string> out;
  for (const auto &s : seg.stmts)
    for (const auto &id : stmt_referenced(s))
      out.insert(id);
  return out;
}

std::set<std::string> segment_defined(const Segment &seg) {
  std::set<std::string> out;
  for (const auto &s : seg.stmts)
    for (const auto &id : stmt_defined(s))
      out.insert(id);
  return out;
}

// Names the segment itself assigns or mutates (not just declares).
std::set<std::string> segment_assigned(const Segment &seg) {
  std::set<std::string> out;
  for (const auto &s : seg.stmts) {
    if (s.kind == Stmt::Kind::Let)
      continue; // a declaration, not a mutation of an incoming value
    for (const auto &id : stmt_defined(s))
      out.insert(id);
  }
  return out;
}

void compute_live_vars(SegmentPlan &plan) {
  std::set<std::string> param_names;
  for (const auto &p : plan.function.params)
    param_names.insert(p.name);
  auto decls = top_level_decls(plan.function);

  size_t n = plan.segments.size();
  // referenced in segment k or any later one
  std::vector<std::set<std::string>> ref_suffix(n + 1);
  for (size_t k = n; k-- > 0;) {
    ref_suffix[k] = ref_suffix[k + 1];
    for (const auto &id : segment_referenced(plan.segments[k]))
      ref_suffix[k].insert(id);
  }
  std::set<std::string> defined_before;
  for (size_t k = 0; k < n; k++) {
    Segment &seg = plan.segments[k];
    std::set<std::string> assigned_here = segment_assigned(seg);
    for (const auto &name : ref_suffix[k]) {
      if (param_names.count(name) || !defined_before.count(name))
        continue;
      auto it = decls.find(name);
      std::string type_text = it != decls.end() ? it->second.type_text
                                                : std::string("usize");
      LiveVar lv;
      lv.name = name;
      lv.type_text = type_text;
      lv.by_ref = starts_with(type_text, "Vec") || starts_with(type_text, "&");
      lv.mutable_in_segment = assigned_here.count(name) != 0;
      seg.live_vars.push_back(std::move(lv));
    }
    // keep declaration order rather than set order
    std::vector<LiveVar> ordered;
    for (const auto &s : plan.function.body) {
      if (s.kind != Stmt::Kind::Let)
        continue;
      for (auto &lv : seg.live_vars)
        if (lv.name == s.name)
          ordered.push_back(lv);
    }
    for (auto &lv : seg.live_vars) {
      bool present = false;
      for (const auto &o : ordered)
        present = present || o.name == lv.name;
      if (!present)
        ordered.push_back(lv);
    }
    seg.live_vars = std::move(ordered);
    for (const auto &id : segment_defined(seg))
      defined_before.insert(id);
  }
}

} // namespace

SegmentPlan segment_function(const FunctionAst &fn, Granularity granularity) {
  SegmentPlan plan;
  plan.function = fn;
  plan.granularity = granularity;

  std::vector<Segment> segs;
  if (granularity == Granularity::Fine) {
    Segment run;
    run.kind = SegmentKind::LoopFree;
    for (const auto &s : fn.body) {
      if (s.kind == Stmt::Kind::While) {
        if (!run.stmts.empty()) {
          segs.push_back(std::move(run));
          run = Segment{};
        }
        Segment loop;
        loop.kind = SegmentKind::Loop;
        loop.stmts.push_back(s);
        segs.push_back(std::move(loop));
      } else {
        run.stmts.push_back(s);
      }
    }
    if (!run.stmts.empty() || segs.empty())
      segs.push_back(std::move(run));
  } else {
    // Coarse: one segment per loop; runs attach to the following loop and a
    // trailing run to the preceding loop.
    Segment cur;
    cur.kind = SegmentKind::LoopFree;
    for (const auto &s : fn.body) {
      cur.stmts.push_back(s);
      if (s.kind == Stmt::Kind::While) {
        cur.kind = SegmentKind::Loop;
        segs.push_back(std::move(cur));
        cur = Segment{};
        cur.kind = SegmentKind::LoopFree;
      }
    }
    if (!cur.stmts.empty()) {
      if (!segs.empty()) {
        for (auto &s : cur.stmts)
          segs.back().stmts.push_back(std::move(s));
      } else {
        segs.push_back(std::move(cur));
      }
    } else if (segs.empty()) {
      segs.push_back(std::move(cur)); // empty function body
    }
  }
  for (size_t i = 0; i < segs.size(); i++)
    segs[i].id = static_cast<int>(i);
  plan.segments = std::move(segs);

  plan.boundaries.assign(plan.segments.size() + 1, std::nullopt);
  plan.boundaries.front() = fn.requires_clauses;
  plan.boundaries.back() = fn.ensures_clauses;

  compute_live_vars(plan);
  return plan;
}

namespace {

bool clause_in(const Interface &list, const SpecExpr &clause) {
  for (const auto &c : list)
    if (normalize_ws(c.raw_text) == normalize_ws(clause.raw_text))
      return true;
  return false;
}

// Mutable-reference params written before this segment invalidate requires
// clauses that mention them.
std::set<std::string> params_written_before(const SegmentPlan &plan,
                                            int seg_id) {
  std::set<std::string> mut_params;
  for (const auto &p : plan.function.params)
    if (p.mutable_ref)
      mut_params.insert(p.name);
  std::set<std::string> written;
  for (int k = 0; k < seg_id; k++)
    for (const auto &id : segment_defined(plan.segments[k]))
      if (mut_params.count(id))
        written.insert(id);
  return written;
}

} // namespace

FunctionAst build_subprogram(const SegmentPlan &plan, int seg_id) {
  const Segment &seg = plan.segments.at(seg_id);
  const auto &entry = plan.entry_interface(seg_id);
  const auto &exit = plan.exit_interface(seg_id);
  if (!entry)
    throw InterfaceUnresolved("segment " + std::to_string(seg_id) +
                              ": entry interface is unresolved");
  if (!exit)
    throw InterfaceUnresolved("segment " + std::to_string(seg_id) +
                              ": exit interface is unresolved");

  FunctionAst sub;
  sub.is_pub = plan.function.is_pub;
  sub.name = plan.function.name;
  sub.params = plan.function.params;
  for (const auto &lv : seg.live_vars) {
    Param p;
    p.name = lv.name;
    if (lv.by_ref) {
      p.type_text = starts_with(lv.type_text, "&") ? lv.type_text
                                                   : "&mut " + lv.type_text;
      p.mutable_ref = true;
    } else {
      p.type_text = lv.type_text;
    }
    sub.params.push_back(std::move(p));
  }

  std::set<std::string> invalidated = params_written_before(plan, seg_id);
  std::set<std::string> available;
  for (const auto &p : sub.params)
    available.insert(p.name);
  for (const auto &clause : plan.function.requires_clauses) {
    bool ok = true;
    for (const auto &id : clause.identifiers)
      if (!available.count(id) || invalidated.count(id))
        ok = false;
    if (ok)
      sub.requires_clauses.push_back(clause);
  }

  // scalars assigned inside the segment are re-bound mutably
  for (const auto &lv : seg.live_vars) {
    if (lv.by_ref || !lv.mutable_in_segment)
      continue;
    Stmt rebind;
    rebind.kind = Stmt::Kind::Let;
    rebind.is_mut = true;
    rebind.name = lv.name;
    rebind.type_text = lv.type_text;
    rebind.expr = lv.name;
    sub.body.push_back(std::move(rebind));
  }
  for (const auto &clause : *entry) {
    if (clause_in(sub.requires_clauses, clause))
      continue;
    Stmt assume;
    assume.kind = Stmt::Kind::Assume;
    assume.expr = clause.raw_text;
    sub.body.push_back(std::move(assume));
  }
  for (const auto &s : seg.stmts)
    sub.body.push_back(s);
  if (!exit->empty()) {
    Stmt proof;
    proof.kind = Stmt::Kind::Proof;
    for (const auto &clause : *exit) {
      Stmt a;
      a.kind = Stmt::Kind::Assert;
      a.expr = clause.raw_text;
      proof.body.push_back(std::move(a));
    }
    sub.body.push_back(std::move(proof));
  }
  return sub;
}

FunctionAst build_prefix_program(const SegmentPlan &plan, int seg_id) {
  FunctionAst prefix;
  prefix.is_pub = plan.function.is_pub;
  prefix.name = plan.function.name;
  prefix.params = plan.function.params;
  prefix.requires_clauses = plan.function.requires_clauses;
  for (int k = 0; k <= seg_id; k++)
    for (const auto &s : plan.segments[k].stmts)
      prefix.body.push_back(s);
  return prefix;
}

} // namespace proofsmith
