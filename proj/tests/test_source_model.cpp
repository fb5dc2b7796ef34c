#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "generators.hpp"
#include "proofsmith/source_model.hpp"
#include "proofsmith/text.hpp"

#include <functional>

using namespace proofsmith;

namespace {

std::string fixture(const std::string &name) {
  return read_file(std::string(FIXTURES_DIR) + "/programs/" + name);
}

} // namespace

TEST_CASE("source program keeps line identity") {
  SourceProgram p = SourceProgram::from_text("a\nb\n\nc");
  REQUIRE(p.lines.size() == 4);
  CHECK(p.lines[0] == std::pair<int, std::string>{1, "a"});
  CHECK(p.lines[2].second == "");
  std::string joined;
  for (size_t i = 0; i < p.lines.size(); i++)
    joined += p.lines[i].second + (i + 1 < p.lines.size() ? "\n" : "");
  CHECK(joined == p.raw_text);
}

TEST_CASE("parses the reverse fixture") {
  FunctionAst fn = parse_function(fixture("reverse.rs"));
  CHECK(fn.name == "reverse");
  CHECK_FALSE(fn.is_pub);
  REQUIRE(fn.params.size() == 1);
  CHECK(fn.params[0].name == "v");
  CHECK(fn.params[0].type_text == "&mut Vec<u64>");
  CHECK(fn.params[0].mutable_ref);
  CHECK(fn.requires_clauses.empty());
  REQUIRE(fn.ensures_clauses.size() == 2);
  CHECK(fn.ensures_clauses[0].raw_text == "v.len() == old(v).len()");
  CHECK(fn.ensures_clauses[1].identifiers == std::set<std::string>{"v"});
  REQUIRE(fn.body.size() == 3);
  CHECK(fn.body[0].kind == Stmt::Kind::Let);
  CHECK(fn.body[0].type_text.empty());
  CHECK(fn.body[1].kind == Stmt::Kind::Let);
  CHECK(fn.body[1].type_text == "usize");
  REQUIRE(fn.body[2].kind == Stmt::Kind::While);
  const Stmt &loop = fn.body[2];
  CHECK(loop.invariants.empty());
  REQUIRE(loop.body.size() == 5);
  CHECK(loop.body[2].kind == Stmt::Kind::MethodCall);
  CHECK(loop.body[2].receiver == "v");
  CHECK(loop.body[2].method == "set");
  REQUIRE(loop.body[2].args.size() == 2);
  CHECK(loop.body[2].args[0] == "n");
  CHECK(loop.body[4].kind == Stmt::Kind::Assign);
  CHECK(loop.body[4].target == "n");
}

TEST_CASE("parses the capped-sum fixture") {
  FunctionAst fn = parse_function(fixture("capped_sum.rs"));
  CHECK(fn.is_pub);
  CHECK(fn.name == "foo");
  REQUIRE(fn.requires_clauses.size() == 2);
  CHECK(fn.requires_clauses[1].raw_text == "N <= 0x7FFF_FFFF");
  CHECK(fn.requires_clauses[1].identifiers == std::set<std::string>{"N"});
  REQUIRE(fn.body.size() == 6);
  CHECK(fn.body[1].kind == Stmt::Kind::While);
  CHECK(fn.body[1].body[0].kind == Stmt::Kind::If);
  CHECK(fn.body[2].kind == Stmt::Kind::Assign);
  CHECK(fn.body[5].kind == Stmt::Kind::Assert);
  CHECK(fn.body[5].expr == "sum <= 2 * N");
}

TEST_CASE("empty function parses and prints canonically") {
  FunctionAst fn = parse_function("fn f() { }");
  CHECK(fn.name == "f");
  CHECK(fn.params.empty());
  CHECK(fn.requires_clauses.empty());
  CHECK(fn.ensures_clauses.empty());
  CHECK(fn.body.empty());
  CHECK(print_function(fn) == "fn f()\n{\n}\n");
}

TEST_CASE("fixtures round-trip through print and parse") {
  for (const char *name :
       {"reverse.rs", "reverse_proved.rs", "reverse_4inv.rs", "capped_sum.rs",
        "capped_sum_proved.rs", "fill.rs", "fill_proved.rs", "copy_vec.rs",
        "copy_vec_proved.rs", "min_index.rs", "two_phase.rs"}) {
    CAPTURE(name);
    FunctionAst a = parse_function(fixture(name));
    std::string printed = print_function(a);
    FunctionAst b = parse_function(printed);
    CHECK(a == b);
    // print is a fixpoint from the first canonical form on
    CHECK(print_function(b) == printed);
  }
}

TEST_CASE("while invariants and clause comments survive the round trip") {
  FunctionAst fn = parse_function(fixture("reverse_proved.rs"));
  const Stmt &loop = fn.body[2];
  REQUIRE(loop.invariants.size() == 5);
  CHECK(loop.invariants[0].raw_text == "0 <= n <= length / 2");
  REQUIRE(loop.invariants[1].trailing_comment.has_value());
  CHECK(*loop.invariants[1].trailing_comment ==
        "// the vector keeps its size");
  FunctionAst again = parse_function(print_function(fn));
  CHECK(fn == again);
}

TEST_CASE("comments attach to the following statement") {
  std::string text = "fn f(v: &mut Vec<u64>)\n{\n"
                     "    // set things up\n"
                     "    let mut i: usize = 0;\n"
                     "    i = i + 1; // bump\n"
                     "    proof { //inline postcondition\n"
                     "        assert(i == 1);\n"
                     "    }\n"
                     "}\n";
  FunctionAst fn = parse_function(text);
  REQUIRE(fn.body.size() == 3);
  REQUIRE(fn.body[0].leading_comments.size() == 1);
  CHECK(fn.body[0].leading_comments[0] == "// set things up");
  REQUIRE(fn.body[1].trailing_comment.has_value());
  CHECK(*fn.body[1].trailing_comment == "// bump");
  REQUIRE(fn.body[2].kind == Stmt::Kind::Proof);
  REQUIRE(fn.body[2].body.size() == 1);
  REQUIRE(fn.body[2].body[0].leading_comments.size() == 1);
  CHECK(fn.body[2].body[0].leading_comments[0] == "//inline postcondition");
  CHECK(parse_function(print_function(fn)) == fn);
}

TEST_CASE("parse errors name line and construct") {
  SUBCASE("for loop") {
    try {
      parse_function("fn f()\n{\n    for x in v { }\n}\n");
      FAIL("expected ParseError");
    } catch (const ParseError &e) {
      CHECK(e.line == 3);
      CHECK(contains(e.what(), "unsupported construct: for"));
    }
  }
  SUBCASE("return type") {
    CHECK_THROWS_AS(parse_function("fn f() -> u32 { }"), ParseError);
  }
  SUBCASE("indexed assignment") {
    try {
      parse_function("fn f(v: &mut Vec<u64>)\n{\n    v[0] = 1;\n}\n");
      FAIL("expected ParseError");
    } catch (const ParseError &e) {
      CHECK(e.line == 3);
      CHECK(contains(e.what(), "assignment"));
    }
  }
  SUBCASE("compound assignment") {
    CHECK_THROWS_AS(parse_function("fn f()\n{\n    let mut i: usize = 0;\n"
                                   "    i += 1;\n}\n"),
                    ParseError);
  }
  SUBCASE("two functions in one file") {
    CHECK_THROWS_AS(parse_function("fn f() { }\nfn g() { }\n"), ParseError);
  }
  SUBCASE("missing brace") {
    CHECK_THROWS_AS(parse_function("fn f()\n{\n    let x = 1;\n"), ParseError);
  }
  SUBCASE("decreases clause") {
    CHECK_THROWS_AS(
        parse_function(
            "fn f(n: u32)\n{\n    while n > 0\n        decreases n,\n    {\n"
            "    }\n}\n"),
        ParseError);
  }
  SUBCASE("non-assert inside proof block") {
    CHECK_THROWS_AS(
        parse_function("fn f()\n{\n    proof {\n        let x = 1;\n    }\n}\n"),
        ParseError);
  }
}

TEST_CASE("extract_identifiers on the paper clauses") {
  CHECK(extract_identifiers("forall |k:int| 0 <= k < N ==> a[k] <= 2") ==
        std::set<std::string>{"N", "a"});
  CHECK(extract_identifiers("true").empty());
  CHECK(extract_identifiers("v.len() == old(v).len()") ==
        std::set<std::string>{"v"});
  CHECK(extract_identifiers("N <= 0x7FFF_FFFF") == std::set<std::string>{"N"});
  CHECK(extract_identifiers("i < N as usize") ==
        std::set<std::string>{"N", "i"});
  CHECK(extract_identifiers("old(a).len() == N") ==
        std::set<std::string>{"N", "a"});
  CHECK(extract_identifiers(
            "forall |i:int, j:int| 0 <= i < j && j < n ==> w[i] <= w[j]") ==
        std::set<std::string>{"n", "w"});
}

TEST_CASE("extract_identifiers rejects unbalanced delimiters") {
  CHECK_THROWS_AS(extract_identifiers("a[(b]"), ParseError);
  CHECK_THROWS_AS(extract_identifiers("old(v.len()"), ParseError);
  CHECK_THROWS_AS(extract_identifiers("a) + b"), ParseError);
}

TEST_CASE("extract_identifiers agrees with the reference scanner") {
  std::vector<std::string> cases = {
      "v.len() == old(v).len()",
      "forall |k:int| 0 <= k < N ==> a[k] <= 2",
      "sum <= 2 * N",
      "a[i] > 2 && i < N as usize",
      "exists |t:int| lo <= t && t < hi && v[t] == x",
      "old(buf).len() >= start + count",
  };
  testgen::ProgramGen gen(1234);
  for (int i = 0; i < 200; i++)
    cases.push_back(gen.clause_text());
  for (const auto &c : cases) {
    CAPTURE(c);
    CHECK(extract_identifiers(c) == testgen::reference_identifiers(c));
  }
}

TEST_CASE("quantifier-bound names never appear in identifier sets") {
  testgen::ProgramGen gen(99);
  for (int i = 0; i < 100; i++) {
    std::string clause = gen.clause_text();
    auto ids = extract_identifiers(clause);
    CHECK_FALSE(ids.count("q")); // the generator's only binder name
  }
}

TEST_CASE("generated programs round-trip: parse after print is identity") {
  testgen::ProgramGen gen(42);
  for (int i = 0; i < 200; i++) {
    FunctionAst fn = gen.function();
    std::string printed = print_function(fn);
    CAPTURE(printed);
    FunctionAst reparsed = parse_function(printed);
    CHECK(reparsed == fn);
    CHECK(print_function(reparsed) == printed);
  }
}

TEST_CASE("leaf statements keep line provenance") {
  std::string text = fixture("capped_sum.rs");
  SourceProgram src = SourceProgram::from_text(text);
  FunctionAst fn = parse_function(src);
  // every leaf statement's printed form appears verbatim (modulo
  // whitespace) within the line range it claims to come from
  std::function<void(const Stmt &)> check = [&](const Stmt &s) {
    switch (s.kind) {
    case Stmt::Kind::Let:
    case Stmt::Kind::Assign:
    case Stmt::Kind::MethodCall:
    case Stmt::Kind::Assert:
    case Stmt::Kind::Assume: {
      REQUIRE(s.start_line >= 1);
      REQUIRE(s.end_line <= static_cast<int>(src.lines.size()));
      std::string span;
      for (int l = s.start_line; l <= s.end_line; l++)
        span += src.lines[static_cast<size_t>(l - 1)].second + "\n";
      std::string printed = normalize_ws(print_stmt(s, 0));
      CHECK(contains(normalize_ws(span), printed));
      break;
    }
    case Stmt::Kind::While:
    case Stmt::Kind::If:
    case Stmt::Kind::Proof:
      for (const auto &b : s.body)
        check(b);
      for (const auto &b : s.else_body)
        check(b);
      break;
    default:
      break;
    }
  };
  for (const auto &s : fn.body)
    check(s);
}

TEST_CASE("stmt_referenced and stmt_defined see through nesting") {
  FunctionAst fn = parse_function(fixture("capped_sum.rs"));
  const Stmt &loop1 = fn.body[1];
  auto refs = stmt_referenced(loop1);
  CHECK(refs.count("a"));
  CHECK(refs.count("i"));
  CHECK(refs.count("N"));
  auto defs = stmt_defined(loop1);
  CHECK(defs.count("a")); // a.set(...)
  CHECK(defs.count("i"));
  CHECK_FALSE(defs.count("N"));
}
