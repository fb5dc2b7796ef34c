#include "proofsmith/source_model.hpp"

#include "proofsmith/text.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>

namespace proofsmith {

SourceProgram SourceProgram::from_text(std::string text) {
  SourceProgram p;
  p.raw_text = std::move(text);
  int n = 1;
  std::string cur;
  for (char c : p.raw_text) {
    if (c == '\n') {
      p.lines.emplace_back(n++, cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty() || p.lines.empty())
    p.lines.emplace_back(n, cur);
  return p;
}

namespace {

enum class TokKind { Ident, Number, Punct, Comment, End };

struct Token {
  TokKind kind;
  std::string text;
  int line;
  size_t begin, end; // byte offsets into the source
};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::vector<Token> lex(const std::string &src) {
  static const char *multi[] = {"<==>", "==>", "==", "!=", "<=", ">=",
                                "&&",   "||",  "+=", "-=", "::", "->",
                                ".."};
  std::vector<Token> toks;
  size_t i = 0;
  int line = 1;
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      line++;
      i++;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      i++;
      continue;
    }
    size_t begin = i;
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      size_t e = src.find('\n', i);
      if (e == std::string::npos)
        e = src.size();
      toks.push_back({TokKind::Comment, src.substr(i, e - i), line, begin, e});
      i = e;
      continue;
    }
    if (ident_start(c)) {
      size_t e = i;
      while (e < src.size() && ident_char(src[e]))
        e++;
      toks.push_back({TokKind::Ident, src.substr(i, e - i), line, begin, e});
      i = e;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      // numeric literal; absorbs hex digits, underscores and suffixes
      size_t e = i;
      while (e < src.size() && (ident_char(src[e])))
        e++;
      toks.push_back({TokKind::Number, src.substr(i, e - i), line, begin, e});
      i = e;
      continue;
    }
    bool matched = false;
    for (const char *m : multi) {
      size_t len = std::strlen(m);
      if (src.compare(i, len, m) == 0) {
        toks.push_back({TokKind::Punct, m, line, begin, i + len});
        i += len;
        matched = true;
        break;
      }
    }
    if (matched)
      continue;
    toks.push_back({TokKind::Punct, std::string(1, c), line, begin, i + 1});
    i++;
  }
  toks.push_back({TokKind::End, "", line, src.size(), src.size()});
  return toks;
}

const std::set<std::string> kSpecKeywords = {
    "forall", "exists", "old",   "as",     "true",   "false", "int",
    "nat",    "bool",   "usize", "isize",  "u8",     "u16",   "u32",
    "u64",    "u128",   "i8",    "i16",    "i32",    "i64",   "i128",
    "Vec",    "if",     "else",  "let",    "mut",    "while", "invariant",
    "requires", "ensures", "assert", "assume", "proof", "fn"};

const std::set<std::string> kUnsupportedStmtKeywords = {
    "for",   "loop",   "match", "return", "break", "continue", "fn",
    "struct", "enum",  "impl",  "trait",  "use",   "mod",      "ghost",
    "decreases", "spec", "exec", "const", "static"};

// Identifier walk shared by extract_identifiers: skips quantifier binders,
// method names after '.', cast targets after 'as'.
std::set<std::string> identifiers_of_tokens(const std::vector<Token> &toks,
                                            size_t from, size_t to) {
  // first pass: quantifier-bound names
  std::set<std::string> bound;
  for (size_t i = from; i < to; i++) {
    if (toks[i].kind == TokKind::Ident &&
        (toks[i].text == "forall" || toks[i].text == "exists")) {
      size_t j = i + 1;
      if (j < to && toks[j].kind == TokKind::Punct && toks[j].text == "|") {
        j++;
        bool expect_name = true;
        while (j < to &&
               !(toks[j].kind == TokKind::Punct && toks[j].text == "|")) {
          if (toks[j].kind == TokKind::Ident && expect_name) {
            bound.insert(toks[j].text);
            expect_name = false;
          }
          if (toks[j].kind == TokKind::Punct && toks[j].text == ",")
            expect_name = true;
          j++;
        }
      }
    }
  }
  std::set<std::string> ids;
  bool in_binder = false;
  for (size_t i = from; i < to; i++) {
    const Token &t = toks[i];
    if (t.kind == TokKind::Punct && t.text == "|") {
      bool binder_open =
          !in_binder && i > from && toks[i - 1].kind == TokKind::Ident &&
          (toks[i - 1].text == "forall" || toks[i - 1].text == "exists");
      if (binder_open)
        in_binder = true;
      else if (in_binder)
        in_binder = false;
      continue;
    }
    if (t.kind != TokKind::Ident)
      continue;
    if (in_binder)
      continue;
    if (kSpecKeywords.count(t.text))
      continue;
    if (bound.count(t.text))
      continue;
    if (i > from && toks[i - 1].kind == TokKind::Punct &&
        (toks[i - 1].text == "." || toks[i - 1].text == "::"))
      continue; // method or path member
    if (i > from && toks[i - 1].kind == TokKind::Ident &&
        toks[i - 1].text == "as")
      continue; // cast target
    ids.insert(t.text);
  }
  return ids;
}

void check_balanced(const std::vector<Token> &toks, size_t from, size_t to,
                    int line) {
  std::vector<char> stack;
  for (size_t i = from; i < to; i++) {
    const Token &t = toks[i];
    if (t.kind != TokKind::Punct || t.text.size() != 1)
      continue;
    char c = t.text[0];
    if (c == '(' || c == '[' || c == '{') {
      stack.push_back(c);
    } else if (c == ')' || c == ']' || c == '}') {
      char open = c == ')' ? '(' : c == ']' ? '[' : '{';
      if (stack.empty() || stack.back() != open)
        throw ParseError(t.line, std::string("unbalanced '") + c + "'");
      stack.pop_back();
    }
  }
  if (!stack.empty())
    throw ParseError(line, std::string("unbalanced '") + stack.back() + "'");
}

class Parser {
public:
  explicit Parser(const std::string &src) : src_(src), toks_(lex(src)) {}

  FunctionAst parse() {
    FunctionAst fn;
    while (at(TokKind::Comment)) {
      fn.leading_comments.push_back(cur().text);
      pos_++;
    }
    fn.start_line = cur().line;
    if (at_ident("pub")) {
      fn.is_pub = true;
      pos_++;
    }
    expect_ident("fn");
    fn.name = expect(TokKind::Ident, "function name").text;
    expect_punct("(");
    fn.params = parse_params();
    if (at_punct("->"))
      throw ParseError(cur().line, "unsupported construct: return type");
    if (at_ident("requires")) {
      pos_++;
      fn.requires_clauses = parse_clause_list();
    }
    if (at_ident("ensures")) {
      pos_++;
      fn.ensures_clauses = parse_clause_list();
    }
    if (at_ident("requires"))
      throw ParseError(cur().line, "requires must precede ensures");
    expect_punct("{");
    auto [stmts, dangling] = parse_block_body();
    fn.body = std::move(stmts);
    if (fn.body.empty())
      fn.body_comments = std::move(dangling);
    else if (!dangling.empty())
      for (auto &c : dangling)
        fn.body.back().post_comments.push_back(c);
    fn.end_line = prev().line;
    while (at(TokKind::Comment))
      pos_++; // stray trailing comments after the closing brace
    if (!at(TokKind::End))
      throw ParseError(cur().line,
                       "unexpected content after function (one function per "
                       "file is supported)");
    return fn;
  }

private:
  const std::string &src_;
  std::vector<Token> toks_;
  size_t pos_ = 0;

  const Token &cur() const { return toks_[pos_]; }
  const Token &prev() const { return toks_[pos_ == 0 ? 0 : pos_ - 1]; }
  bool at(TokKind k) const { return cur().kind == k; }
  bool at_ident(const std::string &s) const {
    return cur().kind == TokKind::Ident && cur().text == s;
  }
  bool at_punct(const std::string &s) const {
    return cur().kind == TokKind::Punct && cur().text == s;
  }
  const Token &expect(TokKind k, const std::string &what) {
    if (cur().kind != k)
      throw ParseError(cur().line, "expected " + what + ", found '" +
                                       (cur().kind == TokKind::End
                                            ? "<end of input>"
                                            : cur().text) +
                                       "'");
    return toks_[pos_++];
  }
  void expect_ident(const std::string &s) {
    if (!at_ident(s))
      throw ParseError(cur().line, "expected '" + s + "', found '" +
                                       cur().text + "'");
    pos_++;
  }
  void expect_punct(const std::string &s) {
    if (!at_punct(s))
      throw ParseError(cur().line, "expected '" + s + "', found '" +
                                       (cur().kind == TokKind::End
                                            ? "<end of input>"
                                            : cur().text) +
                                       "'");
    pos_++;
  }

  std::string slice(size_t from_tok, size_t to_tok) const {
    if (to_tok <= from_tok)
      return "";
    size_t b = toks_[from_tok].begin;
    size_t e = toks_[to_tok - 1].end;
    return normalize_ws(src_.substr(b, e - b));
  }

  std::vector<Param> parse_params() {
    std::vector<Param> params;
    while (!at_punct(")")) {
      Param p;
      p.name = expect(TokKind::Ident, "parameter name").text;
      expect_punct(":");
      size_t ty_begin = pos_;
      int angle = 0;
      while (!(at(TokKind::End)) &&
             !(angle == 0 && (at_punct(",") || at_punct(")")))) {
        if (at_punct("<"))
          angle++;
        else if (at_punct(">"))
          angle--;
        pos_++;
      }
      p.type_text = slice(ty_begin, pos_);
      if (p.type_text.empty())
        throw ParseError(cur().line, "missing type for parameter " + p.name);
      p.mutable_ref = starts_with(p.type_text, "&mut") ||
                      starts_with(p.type_text, "& mut");
      params.push_back(std::move(p));
      if (at_punct(","))
        pos_++;
    }
    expect_punct(")");
    return params;
  }

  // Comma-separated clauses; ends at '{' (body start), at a following
  // section keyword, or at end of input. Binder bars |..| shield commas.
  std::vector<SpecExpr> parse_clause_list() {
    std::vector<SpecExpr> clauses;
    std::vector<std::string> pending_comments;
    int last_clause_line = -1;
    for (;;) {
      if (at(TokKind::Comment)) {
        if (!clauses.empty() && cur().line == last_clause_line &&
            !clauses.back().trailing_comment) {
          clauses.back().trailing_comment = cur().text;
        } else {
          pending_comments.push_back(cur().text);
        }
        pos_++;
        continue;
      }
      if (at(TokKind::End) || at_punct("{") || at_ident("ensures") ||
          at_ident("requires") || at_ident("invariant"))
        break;
      if (at_ident("decreases"))
        throw ParseError(cur().line, "unsupported construct: decreases");
      size_t begin = pos_;
      int depth = 0;
      bool in_binder = false;
      while (!at(TokKind::End)) {
        if (cur().kind == TokKind::Punct) {
          const std::string &t = cur().text;
          if (t == "(" || t == "[")
            depth++;
          else if (t == ")" || t == "]")
            depth--;
          else if (t == "|") {
            bool opener = !in_binder && pos_ > begin &&
                          toks_[pos_ - 1].kind == TokKind::Ident &&
                          (toks_[pos_ - 1].text == "forall" ||
                           toks_[pos_ - 1].text == "exists");
            if (opener)
              in_binder = true;
            else if (in_binder)
              in_binder = false;
          } else if (depth == 0 && !in_binder && (t == "," || t == "{")) {
            break;
          }
        } else if (cur().kind == TokKind::Comment) {
          break;
        } else if (depth == 0 && !in_binder &&
                   (at_ident("ensures") || at_ident("requires") ||
                    at_ident("invariant"))) {
          break;
        }
        pos_++;
      }
      check_balanced(toks_, begin, pos_, toks_[begin].line);
      std::string raw = slice(begin, pos_);
      if (!raw.empty()) {
        SpecExpr e = SpecExpr::make(raw);
        e.leading_comments = std::move(pending_comments);
        pending_comments.clear();
        clauses.push_back(std::move(e));
        last_clause_line = prev().line;
      }
      if (at_punct(",")) {
        last_clause_line = cur().line;
        pos_++;
      }
    }
    if (!pending_comments.empty()) {
      if (clauses.empty())
        throw ParseError(cur().line, "comment in empty clause list");
      for (auto &c : pending_comments)
        clauses.back().leading_comments.push_back(c);
    }
    return clauses;
  }

  // Body of a block whose '{' is already consumed. Returns the statements
  // plus any comments dangling before the closing brace.
  std::pair<std::vector<Stmt>, std::vector<std::string>> parse_block_body() {
    std::vector<Stmt> stmts;
    std::vector<std::string> pending_comments;
    while (!at_punct("}")) {
      if (at(TokKind::End))
        throw ParseError(cur().line, "unexpected end of input, missing '}'");
      if (at(TokKind::Comment)) {
        pending_comments.push_back(cur().text);
        pos_++;
        continue;
      }
      Stmt s = parse_stmt();
      s.leading_comments = std::move(pending_comments);
      pending_comments.clear();
      if (at(TokKind::Comment) && cur().line == s.end_line) {
        s.trailing_comment = cur().text;
        pos_++;
      }
      stmts.push_back(std::move(s));
    }
    expect_punct("}");
    return {std::move(stmts), std::move(pending_comments)};
  }

  Stmt parse_stmt() {
    if (cur().kind == TokKind::Ident &&
        kUnsupportedStmtKeywords.count(cur().text))
      throw ParseError(cur().line,
                       "unsupported construct: " + cur().text);
    if (at_ident("let"))
      return parse_let();
    if (at_ident("while"))
      return parse_while();
    if (at_ident("if"))
      return parse_if();
    if (at_ident("assert"))
      return parse_assert_or_assume(Stmt::Kind::Assert);
    if (at_ident("assume"))
      return parse_assert_or_assume(Stmt::Kind::Assume);
    if (at_ident("proof"))
      return parse_proof();
    if (cur().kind == TokKind::Ident)
      return parse_simple();
    throw ParseError(cur().line, "unsupported construct: '" + cur().text + "'");
  }

  Stmt parse_let() {
    Stmt s;
    s.kind = Stmt::Kind::Let;
    s.start_line = cur().line;
    pos_++; // let
    if (at_ident("mut")) {
      s.is_mut = true;
      pos_++;
    }
    s.name = expect(TokKind::Ident, "binding name").text;
    if (at_punct(":")) {
      pos_++;
      size_t ty_begin = pos_;
      int angle = 0;
      while (!at(TokKind::End) && !(angle == 0 && at_punct("="))) {
        if (at_punct("<"))
          angle++;
        else if (at_punct(">"))
          angle--;
        pos_++;
      }
      s.type_text = slice(ty_begin, pos_);
    }
    expect_punct("=");
    size_t begin = pos_;
    consume_until_semi();
    s.expr = slice(begin, pos_);
    check_balanced(toks_, begin, pos_, s.start_line);
    expect_punct(";");
    s.end_line = prev().line;
    return s;
  }

  void consume_until_semi() {
    int depth = 0;
    while (!at(TokKind::End)) {
      if (cur().kind == TokKind::Punct) {
        const std::string &t = cur().text;
        if (t == "(" || t == "[" || t == "{")
          depth++;
        else if (t == ")" || t == "]" || t == "}")
          depth--;
        else if (t == ";" && depth == 0)
          return;
      }
      pos_++;
    }
    throw ParseError(cur().line, "missing ';'");
  }

  Stmt parse_while() {
    Stmt s;
    s.kind = Stmt::Kind::While;
    s.start_line = cur().line;
    pos_++; // while
    size_t begin = pos_;
    int depth = 0;
    while (!at(TokKind::End)) {
      if (cur().kind == TokKind::Punct) {
        const std::string &t = cur().text;
        if (t == "(" || t == "[")
          depth++;
        else if (t == ")" || t == "]")
          depth--;
        else if (t == "{" && depth == 0)
          break;
      } else if (depth == 0 && at_ident("invariant")) {
        break;
      } else if (depth == 0 && at_ident("decreases")) {
        throw ParseError(cur().line, "unsupported construct: decreases");
      }
      pos_++;
    }
    s.expr = slice(begin, pos_);
    check_balanced(toks_, begin, pos_, s.start_line);
    if (s.expr.empty())
      throw ParseError(s.start_line, "missing loop condition");
    if (at_ident("invariant")) {
      pos_++;
      s.invariants = parse_clause_list();
    }
    expect_punct("{");
    auto [stmts, dangling] = parse_block_body();
    s.body = std::move(stmts);
    attach_dangling(s.body, dangling, s.start_line);
    s.end_line = prev().line;
    return s;
  }

  Stmt parse_if() {
    Stmt s;
    s.kind = Stmt::Kind::If;
    s.start_line = cur().line;
    pos_++; // if
    size_t begin = pos_;
    int depth = 0;
    while (!at(TokKind::End)) {
      if (cur().kind == TokKind::Punct) {
        const std::string &t = cur().text;
        if (t == "(" || t == "[")
          depth++;
        else if (t == ")" || t == "]")
          depth--;
        else if (t == "{" && depth == 0)
          break;
      }
      pos_++;
    }
    s.expr = slice(begin, pos_);
    check_balanced(toks_, begin, pos_, s.start_line);
    if (s.expr.empty())
      throw ParseError(s.start_line, "missing if condition");
    expect_punct("{");
    {
      auto [stmts, dangling] = parse_block_body();
      s.body = std::move(stmts);
      attach_dangling(s.body, dangling, s.start_line);
    }
    if (at_ident("else")) {
      pos_++;
      if (at_ident("if")) {
        s.else_body.push_back(parse_if());
      } else {
        expect_punct("{");
        auto [stmts, dangling] = parse_block_body();
        s.else_body = std::move(stmts);
        attach_dangling(s.else_body, dangling, s.start_line);
      }
    }
    s.end_line = prev().line;
    return s;
  }

  Stmt parse_assert_or_assume(Stmt::Kind kind) {
    Stmt s;
    s.kind = kind;
    s.start_line = cur().line;
    pos_++; // assert / assume
    expect_punct("(");
    size_t begin = pos_;
    int depth = 1;
    while (!at(TokKind::End)) {
      if (cur().kind == TokKind::Punct) {
        const std::string &t = cur().text;
        if (t == "(" || t == "[")
          depth++;
        else if (t == ")" || t == "]") {
          depth--;
          if (depth == 0)
            break;
        }
      }
      pos_++;
    }
    s.expr = slice(begin, pos_);
    check_balanced(toks_, begin, pos_, s.start_line);
    expect_punct(")");
    expect_punct(";");
    s.end_line = prev().line;
    return s;
  }

  Stmt parse_proof() {
    Stmt s;
    s.kind = Stmt::Kind::Proof;
    s.start_line = cur().line;
    pos_++; // proof
    expect_punct("{");
    auto [stmts, dangling] = parse_block_body();
    for (const Stmt &inner : stmts)
      if (inner.kind != Stmt::Kind::Assert)
        throw ParseError(inner.start_line,
                         "unsupported construct: only assert statements are "
                         "supported inside proof blocks");
    s.body = std::move(stmts);
    attach_dangling(s.body, dangling, s.start_line);
    s.end_line = prev().line;
    return s;
  }

  void attach_dangling(std::vector<Stmt> &stmts,
                       std::vector<std::string> &dangling, int line) {
    if (dangling.empty())
      return;
    if (stmts.empty())
      throw ParseError(line, "comment in empty block");
    for (auto &c : dangling)
      stmts.back().post_comments.push_back(c);
  }

  // Assignment, method call, or expression statement.
  Stmt parse_simple() {
    Stmt s;
    s.start_line = cur().line;
    size_t begin = pos_;
    consume_until_semi();
    size_t end = pos_;
    expect_punct(";");
    s.end_line = prev().line;
    check_balanced(toks_, begin, end, s.start_line);

    // ident = expr
    if (end - begin >= 2 && toks_[begin].kind == TokKind::Ident &&
        toks_[begin + 1].kind == TokKind::Punct &&
        toks_[begin + 1].text == "=") {
      s.kind = Stmt::Kind::Assign;
      s.target = toks_[begin].text;
      s.expr = slice(begin + 2, end);
      if (s.expr.empty())
        throw ParseError(s.start_line, "missing right-hand side");
      return s;
    }
    // recv.method(args)
    if (end - begin >= 5 && toks_[begin].kind == TokKind::Ident &&
        toks_[begin + 1].kind == TokKind::Punct &&
        toks_[begin + 1].text == "." &&
        toks_[begin + 2].kind == TokKind::Ident &&
        toks_[begin + 3].kind == TokKind::Punct &&
        toks_[begin + 3].text == "(" &&
        toks_[end - 1].kind == TokKind::Punct && toks_[end - 1].text == ")") {
      s.kind = Stmt::Kind::MethodCall;
      s.receiver = toks_[begin].text;
      s.method = toks_[begin + 2].text;
      // split argument tokens on top-level commas
      size_t arg_begin = begin + 4;
      int depth = 0;
      size_t item = arg_begin;
      for (size_t i = arg_begin; i + 1 < end; i++) {
        const Token &t = toks_[i];
        if (t.kind == TokKind::Punct) {
          if (t.text == "(" || t.text == "[")
            depth++;
          else if (t.text == ")" || t.text == "]")
            depth--;
          else if (t.text == "," && depth == 0) {
            s.args.push_back(slice(item, i));
            item = i + 1;
          }
        }
      }
      if (item < end - 1)
        s.args.push_back(slice(item, end - 1));
      return s;
    }
    // a bare '=' anywhere else means an assignment form we do not model
    for (size_t i = begin; i < end; i++) {
      if (toks_[i].kind != TokKind::Punct)
        continue;
      if (toks_[i].text == "=")
        throw ParseError(toks_[i].line, "unsupported assignment target");
      if (toks_[i].text == "+=" || toks_[i].text == "-=")
        throw ParseError(toks_[i].line,
                         "unsupported construct: compound assignment");
    }
    s.kind = Stmt::Kind::Expr;
    s.expr = slice(begin, end);
    return s;
  }
};

void print_clause_list(std::string &out, const std::string &keyword,
                       const std::vector<SpecExpr> &clauses, int indent) {
  std::string pad(indent, ' ');
  std::string cpad(indent + 4, ' ');
  out += pad + keyword + "\n";
  for (const auto &c : clauses) {
    for (const auto &lc : c.leading_comments)
      out += cpad + lc + "\n";
    out += cpad + c.raw_text + ",";
    if (c.trailing_comment)
      out += " " + *c.trailing_comment;
    out += "\n";
  }
}

void print_stmt_inner(std::string &out, const Stmt &s, int indent) {
  std::string pad(indent, ' ');
  for (const auto &c : s.leading_comments)
    out += pad + c + "\n";
  auto line = [&](const std::string &text) {
    out += pad + text;
    if (s.trailing_comment)
      out += " " + *s.trailing_comment;
    out += "\n";
  };
  switch (s.kind) {
  case Stmt::Kind::Let: {
    std::string t = "let ";
    if (s.is_mut)
      t += "mut ";
    t += s.name;
    if (!s.type_text.empty())
      t += ": " + s.type_text;
    t += " = " + s.expr + ";";
    line(t);
    break;
  }
  case Stmt::Kind::Assign:
    line(s.target + " = " + s.expr + ";");
    break;
  case Stmt::Kind::MethodCall: {
    std::string t = s.receiver + "." + s.method + "(";
    for (size_t i = 0; i < s.args.size(); i++) {
      t += s.args[i];
      if (i + 1 < s.args.size())
        t += ", ";
    }
    t += ");";
    line(t);
    break;
  }
  case Stmt::Kind::While: {
    out += pad + "while " + s.expr + "\n";
    if (!s.invariants.empty())
      print_clause_list(out, "invariant", s.invariants, indent + 4);
    out += pad + "{\n";
    for (const auto &b : s.body)
      print_stmt_inner(out, b, indent + 4);
    out += pad + "}\n";
    break;
  }
  case Stmt::Kind::If: {
    out += pad + "if " + s.expr + " {\n";
    for (const auto &b : s.body)
      print_stmt_inner(out, b, indent + 4);
    if (!s.else_body.empty()) {
      if (s.else_body.size() == 1 && s.else_body[0].kind == Stmt::Kind::If &&
          s.else_body[0].leading_comments.empty()) {
        out += pad + "} else ";
        // print the chained if without its own indent prefix
        std::string chained;
        print_stmt_inner(chained, s.else_body[0], indent);
        out += trim(chained.substr(0, chained.find('\n'))) + "\n";
        size_t nl = chained.find('\n');
        out += chained.substr(nl + 1);
      } else {
        out += pad + "} else {\n";
        for (const auto &b : s.else_body)
          print_stmt_inner(out, b, indent + 4);
        out += pad + "}\n";
      }
    } else {
      out += pad + "}\n";
    }
    break;
  }
  case Stmt::Kind::Assert:
    line("assert(" + s.expr + ");");
    break;
  case Stmt::Kind::Assume:
    line("assume(" + s.expr + ");");
    break;
  case Stmt::Kind::Proof: {
    out += pad + "proof {\n";
    for (const auto &b : s.body)
      print_stmt_inner(out, b, indent + 4);
    out += pad + "}\n";
    break;
  }
  case Stmt::Kind::Expr:
    line(s.expr + ";");
    break;
  }
  for (const auto &c : s.post_comments)
    out += pad + c + "\n";
}

} // namespace

SpecExpr SpecExpr::make(const std::string &raw) {
  SpecExpr e;
  e.raw_text = normalize_ws(raw);
  e.identifiers = extract_identifiers(e.raw_text);
  return e;
}

std::set<std::string> extract_identifiers(const std::string &spec_text) {
  std::vector<Token> toks = lex(spec_text);
  size_t end = toks.size() - 1; // drop End token
  check_balanced(toks, 0, end, 1);
  return identifiers_of_tokens(toks, 0, end);
}

bool Stmt::operator==(const Stmt &o) const {
  return kind == o.kind && name == o.name && is_mut == o.is_mut &&
         type_text == o.type_text && expr == o.expr && target == o.target &&
         receiver == o.receiver && method == o.method && args == o.args &&
         invariants == o.invariants && body == o.body &&
         else_body == o.else_body && leading_comments == o.leading_comments &&
         trailing_comment == o.trailing_comment &&
         post_comments == o.post_comments;
}

bool FunctionAst::operator==(const FunctionAst &o) const {
  return is_pub == o.is_pub && name == o.name && params == o.params &&
         requires_clauses == o.requires_clauses &&
         ensures_clauses == o.ensures_clauses && body == o.body &&
         leading_comments == o.leading_comments &&
         body_comments == o.body_comments;
}

FunctionAst parse_function(const SourceProgram &src) {
  Parser p(src.raw_text);
  return p.parse();
}

FunctionAst parse_function(const std::string &text) {
  return parse_function(SourceProgram::from_text(text));
}

std::string print_stmt(const Stmt &stmt, int indent) {
  std::string out;
  print_stmt_inner(out, stmt, indent);
  return out;
}

std::string print_function(const FunctionAst &fn) {
  std::string out;
  for (const auto &c : fn.leading_comments)
    out += c + "\n";
  out += (fn.is_pub ? "pub fn " : "fn ") + fn.name + "(";
  for (size_t i = 0; i < fn.params.size(); i++) {
    out += fn.params[i].name + ": " + fn.params[i].type_text;
    if (i + 1 < fn.params.size())
      out += ", ";
  }
  out += ")\n";
  if (!fn.requires_clauses.empty())
    print_clause_list(out, "requires", fn.requires_clauses, 4);
  if (!fn.ensures_clauses.empty())
    print_clause_list(out, "ensures", fn.ensures_clauses, 4);
  out += "{\n";
  for (const auto &s : fn.body)
    print_stmt_inner(out, s, 4);
  for (const auto &c : fn.body_comments)
    out += "    " + c + "\n";
  out += "}\n";
  return out;
}

bool is_mutating_method(const std::string &method) {
  static const std::set<std::string> kMutating = {
      "set", "push", "pop", "insert", "remove", "truncate", "clear", "swap",
      "set_len"};
  return kMutating.count(method) != 0;
}

namespace {

void collect_referenced(const Stmt &s, std::set<std::string> &out) {
  auto add_expr = [&out](const std::string &e) {
    if (e.empty())
      return;
    for (const auto &id : extract_identifiers(e))
      out.insert(id);
  };
  switch (s.kind) {
  case Stmt::Kind::Let:
    add_expr(s.expr);
    out.insert(s.name);
    break;
  case Stmt::Kind::Assign:
    out.insert(s.target);
    add_expr(s.expr);
    break;
  case Stmt::Kind::MethodCall:
    out.insert(s.receiver);
    for (const auto &a : s.args)
      add_expr(a);
    break;
  case Stmt::Kind::While:
    add_expr(s.expr);
    for (const auto &inv : s.invariants)
      for (const auto &id : inv.identifiers)
        out.insert(id);
    for (const auto &b : s.body)
      collect_referenced(b, out);
    break;
  case Stmt::Kind::If:
    add_expr(s.expr);
    for (const auto &b : s.body)
      collect_referenced(b, out);
    for (const auto &b : s.else_body)
      collect_referenced(b, out);
    break;
  case Stmt::Kind::Assert:
  case Stmt::Kind::Assume:
  case Stmt::Kind::Expr:
    add_expr(s.expr);
    break;
  case Stmt::Kind::Proof:
    for (const auto &b : s.body)
      collect_referenced(b, out);
    break;
  }
}

void collect_defined(const Stmt &s, std::set<std::string> &out) {
  switch (s.kind) {
  case Stmt::Kind::Let:
    out.insert(s.name);
    break;
  case Stmt::Kind::Assign:
    out.insert(s.target);
    break;
  case Stmt::Kind::MethodCall:
    if (is_mutating_method(s.method))
      out.insert(s.receiver);
    break;
  case Stmt::Kind::While:
  case Stmt::Kind::If:
    for (const auto &b : s.body)
      collect_defined(b, out);
    for (const auto &b : s.else_body)
      collect_defined(b, out);
    break;
  default:
    break;
  }
}

} // namespace

std::set<std::string> stmt_referenced(const Stmt &stmt) {
  std::set<std::string> out;
  collect_referenced(stmt, out);
  return out;
}

std::set<std::string> stmt_defined(const Stmt &stmt) {
  std::set<std::string> out;
  collect_defined(stmt, out);
  return out;
}

} // namespace proofsmith
