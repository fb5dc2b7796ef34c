#include "proofsmith/prompting.hpp"

#include "proofsmith/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <map>

namespace proofsmith {

using nlohmann::json;

std::string prompt_kind_name(PromptKind kind) {
  switch (kind) {
  case PromptKind::Postcondition:
    return "postcondition";
  case PromptKind::Proof:
    return "proof";
  case PromptKind::Repair:
    return "repair";
  }
  return "?";
}

std::vector<FewshotExample> load_fewshot_examples(const std::string &dir,
                                                  PromptKind kind) {
  namespace fs = std::filesystem;
  std::vector<FewshotExample> out;
  if (dir.empty())
    return out;
  fs::path d = fs::path(dir) / prompt_kind_name(kind);
  if (!fs::exists(d))
    return out;
  std::map<std::string, std::pair<bool, bool>> seen;
  for (const auto &entry : fs::directory_iterator(d)) {
    fs::path p = entry.path();
    if (p.extension() == ".input")
      seen[p.stem().string()].first = true;
    else if (p.extension() == ".answer")
      seen[p.stem().string()].second = true;
  }
  for (const auto &[name, flags] : seen) {
    if (!flags.first || !flags.second)
      throw std::runtime_error("fewshot example " + name + " under " +
                               d.string() + " is missing its " +
                               (flags.first ? ".answer" : ".input") + " file");
    FewshotExample ex;
    ex.name = name;
    ex.input = read_file((d / (name + ".input")).string());
    ex.answer = read_file((d / (name + ".answer")).string());
    out.push_back(std::move(ex));
  }
  // std::map iteration already sorted by name
  return out;
}

std::vector<std::string> response_schema(PromptKind kind) {
  if (kind == PromptKind::Postcondition)
    return {"thoughts", "postcondition"};
  return {"thoughts", "verifiable program"};
}

namespace {

const char *kNotes =
    "Notes:\n"
    "1. Do not use Rust primitives such as clone, filter, iter, sum, or "
    "count.\n"
    "2. Do not use the conditional operator \"a ? b : c\".\n";

std::string examples_block(const std::vector<FewshotExample> &examples,
                           const std::string &answer_label) {
  std::string out;
  int n = 1;
  for (const auto &ex : examples) {
    out += "Example " + std::to_string(n++) + ":\n";
    out += ex.input;
    if (!ex.input.empty() && ex.input.back() != '\n')
      out += "\n";
    out += answer_label + ":\n";
    out += ex.answer;
    if (!ex.answer.empty() && ex.answer.back() != '\n')
      out += "\n";
    out += "\n";
  }
  return out;
}

std::string response_requirements(PromptKind kind) {
  std::string out;
  out += "Response requirements:\n"
         "You must respond using the following format and\n"
         "ensure the response could be parsed by json.loads:\n";
  if (kind == PromptKind::Postcondition) {
    out += "{\n"
           "    \"thoughts\": \"<explain the program and its precondition, "
           "then analyze how to write the postcondition>\",\n"
           "    \"postcondition\": \"<postcondition>\"\n"
           "}\n";
  } else {
    out += "{\n"
           "    \"thoughts\": \"<explain the pre and post conditions, and how "
           "to write invariants and proofs>\",\n"
           "    \"verifiable program\": \"<program>\"\n"
           "}\n";
  }
  return out;
}

} // namespace

std::string render_prompt(PromptKind kind, const std::string &subprogram,
                          const std::vector<FewshotExample> &examples,
                          const RepairExtras *extras) {
  std::string out;
  switch (kind) {
  case PromptKind::Postcondition:
    out += "Given a program in Verus (a Rust-like language)\n"
           "with its precondition, returns its postcondition.\n"
           "Some examples and their postconditions are given\n"
           "below:\n";
    out += examples_block(examples, "Postcondition");
    out += kNotes;
    out += "3. Each postcondition takes a separate line.\n";
    break;
  case PromptKind::Proof:
    out += "Given a program in Verus (a Rust-like language),\n"
           "add invariants and proofs to make it verifiable.\n"
           "Some example programs and their verifiable\n"
           "versions are given below:\n";
    out += examples_block(examples, "Verifiable version");
    out += kNotes;
    out += "3. Do not modify or remove any line in the given program. Only "
           "add lines.\n";
    break;
  case PromptKind::Repair:
    if (!extras)
      throw MissingExtras("repair prompt needs the previous program and the "
                          "verifier errors");
    out += "Given a program in Verus (a Rust-like language),\n"
           "a previous attempt to add invariants and proofs,\n"
           "and the errors the verifier reported for it,\n"
           "return a corrected verifiable version of the program.\n"
           "Some example programs and their verifiable\n"
           "versions are given below:\n";
    out += examples_block(examples, "Verifiable version");
    out += kNotes;
    out += "3. Do not modify or remove any line in the given program. Only "
           "add lines.\n";
    break;
  }
  out += "Begin!\n"
         "New Verus program:\n";
  out += subprogram;
  if (subprogram.empty() || subprogram.back() != '\n')
    out += "\n";
  if (kind == PromptKind::Repair) {
    out += "\nPrevious attempt:\n";
    out += extras->previous_program;
    if (extras->previous_program.empty() ||
        extras->previous_program.back() != '\n')
      out += "\n";
    out += "\nVerifier errors:\n";
    out += format_diagnostics(extras->diagnostics);
  }
  out += "\n";
  out += response_requirements(kind);
  return out;
}

namespace {

// First balanced {...} slice, string-literal aware.
std::optional<std::string> first_balanced_object(const std::string &raw) {
  size_t start = raw.find('{');
  if (start == std::string::npos)
    return std::nullopt;
  int depth = 0;
  bool in_string = false;
  for (size_t i = start; i < raw.size(); i++) {
    char c = raw[i];
    if (in_string) {
      if (c == '\\')
        i++;
      else if (c == '"')
        in_string = false;
      continue;
    }
    if (c == '"')
      in_string = true;
    else if (c == '{')
      depth++;
    else if (c == '}') {
      depth--;
      if (depth == 0)
        return raw.substr(start, i - start + 1);
    }
  }
  return std::nullopt;
}

} // namespace

std::variant<LlmReply, FormatError> parse_reply(const std::string &raw,
                                                PromptKind kind) {
  auto obj_text = first_balanced_object(raw);
  if (!obj_text)
    return FormatError{"no balanced {...} object in the reply"};
  json obj;
  try {
    obj = json::parse(*obj_text);
  } catch (const json::exception &e) {
    return FormatError{std::string("reply object is not valid JSON: ") +
                       e.what()};
  }
  if (!obj.is_object())
    return FormatError{"reply is not a JSON object"};
  LlmReply reply;
  for (const auto &field : response_schema(kind)) {
    if (!obj.contains(field))
      return FormatError{"missing field \"" + field + "\""};
    if (!obj[field].is_string())
      return FormatError{"field \"" + field + "\" is not a string"};
  }
  reply.thoughts = obj["thoughts"].get<std::string>();
  std::string payload_field =
      kind == PromptKind::Postcondition ? "postcondition" : "verifiable program";
  reply.payload = obj[payload_field].get<std::string>();
  if (trim(reply.payload).empty())
    return FormatError{"field \"" + payload_field + "\" is empty"};
  return reply;
}

std::string serialize_reply(const LlmReply &reply, PromptKind kind) {
  json obj;
  obj["thoughts"] = reply.thoughts;
  obj[kind == PromptKind::Postcondition ? "postcondition"
                                        : "verifiable program"] = reply.payload;
  return obj.dump();
}

std::vector<SpecExpr> payload_clauses(const std::string &payload) {
  std::vector<SpecExpr> out;
  for (const auto &line : split_lines(payload)) {
    std::string t = trim(line);
    while (!t.empty() && t.back() == ',')
      t = trim(t.substr(0, t.size() - 1));
    if (t.empty() || starts_with(t, "```"))
      continue;
    out.push_back(SpecExpr::make(t));
  }
  return out;
}

AdditiveResult validate_additive(const std::string &original,
                                 const std::string &candidate) {
  std::vector<std::string> cand = normalized_lines(candidate);
  size_t j = 0;
  int line_no = 0;
  for (const auto &raw_line : split_lines(original)) {
    line_no++;
    std::string norm = normalize_ws(raw_line);
    if (norm.empty())
      continue;
    while (j < cand.size() && cand[j] != norm)
      j++;
    if (j == cand.size())
      return {false, line_no, trim(raw_line)};
    j++;
  }
  return {};
}

namespace {

int merge_walk(std::vector<Stmt> &stmts, int &counter, int loop_id,
               const std::vector<SpecExpr> &merged) {
  for (auto &s : stmts) {
    if (s.kind == Stmt::Kind::While) {
      if (counter == loop_id) {
        s.invariants = merged;
        return 1;
      }
      counter++;
      if (merge_walk(s.body, counter, loop_id, merged))
        return 1;
    } else if (s.kind == Stmt::Kind::If) {
      if (merge_walk(s.body, counter, loop_id, merged))
        return 1;
      if (merge_walk(s.else_body, counter, loop_id, merged))
        return 1;
    }
  }
  return 0;
}

void count_top_level(const std::vector<Stmt> &stmts, int &counter,
                     std::vector<int> &out, bool top) {
  for (const auto &s : stmts) {
    if (s.kind == Stmt::Kind::While) {
      if (top)
        out.push_back(counter);
      counter++;
      count_top_level(s.body, counter, out, false);
    } else if (s.kind == Stmt::Kind::If) {
      count_top_level(s.body, counter, out, false);
      count_top_level(s.else_body, counter, out, false);
    }
  }
}

} // namespace

FunctionAst merge_invariants(const FunctionAst &program, int loop_id,
                             const std::vector<SpecExpr> &gpt_clauses,
                             const std::vector<SpecExpr> &propagated) {
  std::vector<SpecExpr> merged;
  std::set<std::string> seen;
  for (const auto &src : {&gpt_clauses, &propagated})
    for (const auto &c : *src)
      if (seen.insert(normalize_ws(c.raw_text)).second)
        merged.push_back(c);
  FunctionAst out = program;
  int counter = 0;
  if (!merge_walk(out.body, counter, loop_id, merged))
    throw UnknownLoop("no loop with id " + std::to_string(loop_id));
  return out;
}

std::vector<int> top_level_loop_ids(const FunctionAst &fn) {
  std::vector<int> out;
  int counter = 0;
  count_top_level(fn.body, counter, out, true);
  return out;
}

} // namespace proofsmith
