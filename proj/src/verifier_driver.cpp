#include "proofsmith/verifier_driver.hpp"

#include "proofsmith/subprocess.hpp"
#include "proofsmith/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <filesystem>
#include <random>

namespace proofsmith {

using nlohmann::json;

std::string diagnostic_kind_name(DiagnosticKind kind) {
  switch (kind) {
  case DiagnosticKind::InvariantNotSatisfiedAtEnd:
    return "invariant_not_satisfied_at_end";
  case DiagnosticKind::InvariantNotSatisfiedBeforeLoop:
    return "invariant_not_satisfied_before_loop";
  case DiagnosticKind::PostconditionFailed:
    return "postcondition_failed";
  case DiagnosticKind::AssertFailed:
    return "assert_failed";
  case DiagnosticKind::ArithmeticOverflow:
    return "arithmetic_overflow";
  case DiagnosticKind::SyntaxOrType:
    return "syntax_or_type";
  case DiagnosticKind::Other:
    return "other";
  }
  return "other";
}

std::optional<DiagnosticKind> diagnostic_kind_from_name(const std::string &s) {
  static const std::pair<const char *, DiagnosticKind> table[] = {
      {"invariant_not_satisfied_at_end", DiagnosticKind::InvariantNotSatisfiedAtEnd},
      {"invariant_not_satisfied_before_loop", DiagnosticKind::InvariantNotSatisfiedBeforeLoop},
      {"postcondition_failed", DiagnosticKind::PostconditionFailed},
      {"assert_failed", DiagnosticKind::AssertFailed},
      {"arithmetic_overflow", DiagnosticKind::ArithmeticOverflow},
      {"syntax_or_type", DiagnosticKind::SyntaxOrType},
      {"other", DiagnosticKind::Other},
  };
  for (const auto &[name, kind] : table)
    if (s == name)
      return kind;
  return std::nullopt;
}

namespace {

std::string lower(const std::string &s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

DiagnosticKind classify_message(const std::string &message) {
  std::string m = lower(message);
  struct Rule {
    const char *needle;
    DiagnosticKind kind;
  };
  // first match wins
  static const Rule rules[] = {
      {"invariant not satisfied at end of loop", DiagnosticKind::InvariantNotSatisfiedAtEnd},
      {"invariant not satisfied at the end", DiagnosticKind::InvariantNotSatisfiedAtEnd},
      {"invariant not satisfied before loop", DiagnosticKind::InvariantNotSatisfiedBeforeLoop},
      {"invariant not satisfied before the loop", DiagnosticKind::InvariantNotSatisfiedBeforeLoop},
      {"postcondition not satisfied", DiagnosticKind::PostconditionFailed},
      {"failed postcondition", DiagnosticKind::PostconditionFailed},
      {"assertion failed", DiagnosticKind::AssertFailed},
      {"assert failed", DiagnosticKind::AssertFailed},
      {"arithmetic underflow", DiagnosticKind::ArithmeticOverflow},
      {"arithmetic overflow", DiagnosticKind::ArithmeticOverflow},
      {"underflow/overflow", DiagnosticKind::ArithmeticOverflow},
      {"out of range", DiagnosticKind::ArithmeticOverflow},
      {"mismatched types", DiagnosticKind::SyntaxOrType},
      {"type mismatch", DiagnosticKind::SyntaxOrType},
      {"cannot find", DiagnosticKind::SyntaxOrType},
      {"unresolved", DiagnosticKind::SyntaxOrType},
      {"expected", DiagnosticKind::SyntaxOrType},
      {"syntax", DiagnosticKind::SyntaxOrType},
  };
  for (const auto &r : rules)
    if (m.find(r.needle) != std::string::npos)
      return r.kind;
  return DiagnosticKind::Other;
}

// "--> file.rs:12:9" or "at line 12"
std::optional<int> scan_line_number(const std::string &line) {
  size_t arrow = line.find("-->");
  if (arrow != std::string::npos) {
    size_t colon = line.find(':', arrow);
    if (colon != std::string::npos) {
      size_t b = colon + 1;
      size_t e = b;
      while (e < line.size() && std::isdigit(static_cast<unsigned char>(line[e])))
        e++;
      if (e > b)
        return std::stoi(line.substr(b, e - b));
    }
  }
  size_t at = line.find("line ");
  if (at != std::string::npos) {
    size_t b = at + 5;
    size_t e = b;
    while (e < line.size() && std::isdigit(static_cast<unsigned char>(line[e])))
      e++;
    if (e > b)
      return std::stoi(line.substr(b, e - b));
  }
  return std::nullopt;
}

} // namespace

std::vector<Diagnostic> parse_diagnostics(const std::string &raw_output) {
  std::vector<Diagnostic> diags;
  Diagnostic *open = nullptr;
  for (const auto &raw_line : split_lines(raw_output)) {
    std::string line = trim(raw_line);
    if (line.empty())
      continue;
    // "error: message" or "error[E0308]: message"
    if (starts_with(line, "error")) {
      size_t colon = line.find(':');
      if (colon != std::string::npos) {
        std::string message = trim(line.substr(colon + 1));
        if (message.empty())
          message = line;
        Diagnostic d;
        d.message = message;
        d.kind = classify_message(line);
        diags.push_back(std::move(d));
        open = &diags.back();
        continue;
      }
    }
    if (open) {
      if (!open->line) {
        if (auto n = scan_line_number(line)) {
          open->line = n;
          continue;
        }
      }
      // first code line shown under the error becomes the snippet
      if (!open->snippet && line.find('|') != std::string::npos) {
        size_t bar = line.find('|');
        std::string code = trim(line.substr(bar + 1));
        if (!code.empty() && code.find_first_not_of('^') != std::string::npos)
          open->snippet = code;
        continue;
      }
      if (starts_with(line, "note:") && open->kind == DiagnosticKind::Other) {
        open->kind = classify_message(line);
      }
    }
  }
  return diags;
}

std::string format_diagnostics(const std::vector<Diagnostic> &diags) {
  std::string out;
  for (const auto &d : diags) {
    out += "error: " + d.message;
    if (d.line)
      out += " (line " + std::to_string(*d.line) + ")";
    if (d.snippet)
      out += "\n    " + *d.snippet;
    out += "\n";
  }
  return out;
}

RealVerifier::RealVerifier(RealVerifierConfig cfg) : cfg_(std::move(cfg)) {}

VerifyResult RealVerifier::verify(const std::string &program_text) {
  namespace fs = std::filesystem;
  if (cfg_.command.empty())
    throw ExecutableNotFound("verifier command is not configured");

  fs::path dir = cfg_.workdir.empty() ? fs::temp_directory_path()
                                      : fs::path(cfg_.workdir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  fs::path file = dir / ("candidate-" + std::to_string(rd()) + "-" +
                         std::to_string(counter++) + ".rs");
  write_file(file.string(), program_text);

  RunResult run = run_process({cfg_.command, file.string()},
                              cfg_.timeout_seconds);
  fs::remove(file, ec);

  if (run.launch_failed)
    throw ExecutableNotFound("cannot execute verifier: " + cfg_.command);

  VerifyResult res;
  res.raw_output = run.err.empty() ? run.out : run.err;
  if (run.timed_out) {
    res.status = VerifyStatus::Crashed;
    res.exit_info = "timeout after " + std::to_string(cfg_.timeout_seconds) +
                    "s";
    return res;
  }
  std::vector<Diagnostic> diags = parse_diagnostics(run.err);
  if (diags.empty())
    diags = parse_diagnostics(run.out);
  // drop line numbers that fall outside the candidate program
  int max_line = static_cast<int>(split_lines(program_text).size());
  for (auto &d : diags)
    if (d.line && (*d.line < 1 || *d.line > max_line))
      d.line.reset();
  if (run.exit_code == 0 && diags.empty()) {
    res.status = VerifyStatus::Verified;
    return res;
  }
  if (!diags.empty()) {
    res.status = VerifyStatus::Failed;
    res.diagnostics = std::move(diags);
    return res;
  }
  res.status = VerifyStatus::Crashed;
  res.exit_info = "exit code " + std::to_string(run.exit_code) +
                  " with no parseable errors";
  return res;
}

std::string normalized_program_hash(const std::string &program_text) {
  return fnv1a64_hex(normalize_program(program_text));
}

namespace {

VerifyResult result_from_json(const json &j, const std::string &origin) {
  VerifyResult res;
  std::string status = j.at("result").get<std::string>();
  if (status == "verified") {
    res.status = VerifyStatus::Verified;
  } else if (status == "failed") {
    res.status = VerifyStatus::Failed;
    if (!j.contains("diagnostics") || j["diagnostics"].empty())
      throw std::runtime_error(origin +
                               ": failed entry needs at least one diagnostic");
    for (const auto &dj : j["diagnostics"]) {
      Diagnostic d;
      std::string kind = dj.value("kind", "other");
      auto k = diagnostic_kind_from_name(kind);
      if (!k)
        throw std::runtime_error(origin + ": unknown diagnostic kind " + kind);
      d.kind = *k;
      d.message = dj.at("message").get<std::string>();
      if (dj.contains("line"))
        d.line = dj["line"].get<int>();
      if (dj.contains("snippet"))
        d.snippet = dj["snippet"].get<std::string>();
      res.diagnostics.push_back(std::move(d));
    }
  } else if (status == "crashed") {
    res.status = VerifyStatus::Crashed;
    res.exit_info = j.value("exit_info", "scripted crash");
  } else {
    throw std::runtime_error(origin + ": unknown result " + status);
  }
  res.raw_output = j.value("raw_output", "");
  return res;
}

} // namespace

StubVerifier StubVerifier::from_file(const std::string &path) {
  return from_json_text(read_file(path), path);
}

StubVerifier StubVerifier::from_json_text(const std::string &json_text,
                                          const std::string &origin) {
  StubVerifier stub;
  stub.origin_ = origin;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception &e) {
    throw std::runtime_error("stub script " + origin + ": " + e.what());
  }
  const json &entries = j.is_array() ? j : j.at("entries");
  for (const auto &ej : entries) {
    Entry e;
    if (ej.contains("program_hash"))
      e.program_hash = ej["program_hash"].get<std::string>();
    if (ej.contains("contains"))
      for (const auto &p : ej["contains"])
        e.contains.push_back(p.get<std::string>());
    e.is_default = ej.value("default", false);
    if (!e.program_hash && e.contains.empty() && !e.is_default)
      throw std::runtime_error("stub script " + origin +
                               ": entry needs program_hash, contains or "
                               "default");
    e.result = result_from_json(ej, origin);
    stub.entries_.push_back(std::move(e));
  }
  return stub;
}

VerifyResult StubVerifier::verify(const std::string &program_text) {
  std::string normalized = normalize_program(program_text);
  std::string hash = fnv1a64_hex(normalized);
  for (const auto &e : entries_)
    if (e.program_hash && *e.program_hash == hash)
      return e.result;
  for (const auto &e : entries_) {
    if (e.contains.empty())
      continue;
    // patterns may span lines; both sides are normalized line-wise
    bool all = true;
    for (const auto &p : e.contains)
      all = all && contains(normalized, normalize_program(p));
    if (all)
      return e.result;
  }
  for (const auto &e : entries_)
    if (e.is_default)
      return e.result;
  throw StubScriptMiss("stub script " + origin_ +
                       ": no entry matches program hash " + hash);
}

} // namespace proofsmith
