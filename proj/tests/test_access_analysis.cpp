#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "generators.hpp"
#include "proofsmith/access_analysis.hpp"
#include "proofsmith/text.hpp"

using namespace proofsmith;

namespace {

std::string fixture(const std::string &name) {
  return read_file(std::string(FIXTURES_DIR) + "/programs/" + name);
}

const Stmt &nth_top_loop(const FunctionAst &fn, int n) {
  int seen = 0;
  for (const auto &s : fn.body)
    if (s.kind == Stmt::Kind::While && seen++ == n)
      return s;
  throw std::runtime_error("no such loop");
}

std::vector<std::string> texts(const std::vector<SpecExpr> &clauses) {
  std::vector<std::string> out;
  for (const auto &c : clauses)
    out.push_back(c.raw_text);
  return out;
}

} // namespace

TEST_CASE("capped-sum loops have the hand-derived access sets") {
  FunctionAst fn = parse_function(fixture("capped_sum.rs"));
  AccessSets first = loop_access_sets(nth_top_loop(fn, 0));
  CHECK(first.reads == std::set<std::string>{"a", "i", "N"});
  CHECK(first.writes == std::set<std::string>{"a", "i"});
  AccessSets second = loop_access_sets(nth_top_loop(fn, 1));
  CHECK(second.reads == std::set<std::string>{"a", "i", "N", "sum"});
  CHECK(second.writes == std::set<std::string>{"i", "sum"});
}

TEST_CASE("reverse loop excludes its loop-local bindings") {
  FunctionAst fn = parse_function(fixture("reverse.rs"));
  AccessSets acc = loop_access_sets(nth_top_loop(fn, 0));
  CHECK(acc.reads == std::set<std::string>{"v", "n", "length"});
  CHECK(acc.writes == std::set<std::string>{"v", "n"});
  CHECK_FALSE(acc.reads.count("x"));
  CHECK_FALSE(acc.reads.count("y"));
}

TEST_CASE("empty loop body reads only the condition") {
  FunctionAst fn = parse_function("fn f(c: bool)\n{\n    while c\n    {\n"
                                  "    }\n}\n");
  AccessSets acc = loop_access_sets(fn.body[0]);
  CHECK(acc.reads == std::set<std::string>{"c"});
  CHECK(acc.writes.empty());
}

TEST_CASE("loop_access_sets rejects non-loops") {
  FunctionAst fn = parse_function("fn f()\n{\n    let x = 1;\n}\n");
  CHECK_THROWS_AS(loop_access_sets(fn.body[0]), std::invalid_argument);
}

TEST_CASE("propagation keeps exactly the write-free read clauses") {
  // first loop of the capped-sum function: writes {a, i}, reads {a, i, N}
  std::vector<SpecExpr> pre = {SpecExpr::make("old(a).len() == N"),
                               SpecExpr::make("N <= 0x7FFF_FFFF")};
  AccessSets acc;
  acc.reads = {"a", "i", "N"};
  acc.writes = {"a", "i"};
  auto out = propagate_invariants(pre, acc);
  CHECK(texts(out) == std::vector<std::string>{"N <= 0x7FFF_FFFF"});
}

TEST_CASE("second-loop propagation from the worked example") {
  std::vector<SpecExpr> pre = {
      SpecExpr::make("i == N"), SpecExpr::make("a.len() == N"),
      SpecExpr::make("forall |k:int| 0 <= k < a.len() ==> a[k] <= 2"),
      SpecExpr::make("N <= 0x7FFF_FFFF")};
  AccessSets acc;
  acc.reads = {"i", "sum", "a", "N"};
  acc.writes = {"i", "sum"};
  auto out = propagate_invariants(pre, acc);
  CHECK(texts(out) ==
        std::vector<std::string>{
            "a.len() == N",
            "forall |k:int| 0 <= k < a.len() ==> a[k] <= 2",
            "N <= 0x7FFF_FFFF"});
}

TEST_CASE("empty precondition list propagates nothing") {
  AccessSets acc;
  acc.reads = {"a"};
  CHECK(propagate_invariants({}, acc).empty());
}

TEST_CASE("identifier-free clauses never propagate") {
  AccessSets acc;
  acc.reads = {"a"};
  auto out = propagate_invariants({SpecExpr::make("true")}, acc);
  CHECK(out.empty());
}

TEST_CASE("duplicate clauses are suppressed by normalized text") {
  std::vector<SpecExpr> pre = {SpecExpr::make("n  <=  10"),
                               SpecExpr::make("n <= 10"),
                               SpecExpr::make("n <= 11")};
  AccessSets acc;
  acc.reads = {"n"};
  auto out = propagate_invariants(pre, acc);
  CHECK(texts(out) == std::vector<std::string>{"n <= 10", "n <= 11"});
}

TEST_CASE("propagation matches the brute-force predicate on random cases") {
  testgen::Rng rng(2024);
  for (int i = 0; i < 200; i++) {
    auto pc = testgen::random_propagation_case(rng);
    auto expect = testgen::oracle_propagate(pc.clauses, pc.acc);
    auto got = propagate_invariants(pc.clauses, pc.acc);
    REQUIRE(texts(got) == texts(expect));
    // soundness of every kept clause, and of every dropped one
    std::set<std::string> kept;
    for (const auto &c : got)
      kept.insert(normalize_ws(c.raw_text));
    for (const auto &c : pc.clauses) {
      bool writes_clean = true, reads_some = false;
      for (const auto &id : c.identifiers) {
        if (pc.acc.writes.count(id))
          writes_clean = false;
        if (pc.acc.reads.count(id))
          reads_some = true;
      }
      if (kept.count(normalize_ws(c.raw_text)))
        CHECK((writes_clean && reads_some));
    }
  }
}

TEST_CASE("propagation output order is a stable subsequence of the input") {
  testgen::Rng rng(55);
  for (int i = 0; i < 100; i++) {
    auto pc = testgen::random_propagation_case(rng);
    auto got = texts(propagate_invariants(pc.clauses, pc.acc));
    auto input = texts(pc.clauses);
    size_t j = 0;
    for (const auto &line : input)
      if (j < got.size() && got[j] == line)
        j++;
    CHECK(j == got.size());
  }
}

TEST_CASE("shrinking writes never removes a propagated clause") {
  testgen::Rng rng(77);
  for (int i = 0; i < 100; i++) {
    auto pc = testgen::random_propagation_case(rng);
    auto before = texts(propagate_invariants(pc.clauses, pc.acc));
    AccessSets smaller = pc.acc;
    if (!smaller.writes.empty())
      smaller.writes.erase(smaller.writes.begin());
    auto after = texts(propagate_invariants(pc.clauses, smaller));
    for (const auto &c : before)
      CHECK(std::find(after.begin(), after.end(), c) != after.end());
  }
}

TEST_CASE("shrinking reads never adds a propagated clause") {
  testgen::Rng rng(78);
  for (int i = 0; i < 100; i++) {
    auto pc = testgen::random_propagation_case(rng);
    auto before = texts(propagate_invariants(pc.clauses, pc.acc));
    AccessSets smaller = pc.acc;
    if (!smaller.reads.empty())
      smaller.reads.erase(smaller.reads.begin());
    auto after = texts(propagate_invariants(pc.clauses, smaller));
    for (const auto &c : after)
      CHECK(std::find(before.begin(), before.end(), c) != before.end());
  }
}

TEST_CASE("access sets match the brute-force enumerator on generated loops") {
  testgen::ProgramGen gen(4242);
  for (int i = 0; i < 200; i++) {
    Stmt loop = gen.loop_for_analysis();
    AccessSets got = loop_access_sets(loop);
    AccessSets expect = testgen::oracle_access_sets(loop);
    CAPTURE(print_stmt(loop, 0));
    CHECK(got.reads == expect.reads);
    CHECK(got.writes == expect.writes);
  }
}

TEST_CASE("mutable-reference call arguments count as writes") {
  FunctionAst fn = parse_function(
      "fn f(v: &mut Vec<u64>, n: u32)\n{\n"
      "    while n > 0\n    {\n        v.swap(&mut n, 1);\n    }\n}\n");
  AccessSets acc = loop_access_sets(fn.body[0]);
  CHECK(acc.writes.count("v"));
  CHECK(acc.writes.count("n"));
}
