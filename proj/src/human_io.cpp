#include "proofsmith/human_io.hpp"

#include "proofsmith/text.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>

namespace proofsmith {

using nlohmann::json;

std::string correction_class_name(CorrectionClass c) {
  switch (c) {
  case CorrectionClass::Syntax:
    return "syntax";
  case CorrectionClass::Semantics:
    return "semantics";
  case CorrectionClass::Both:
    return "both";
  }
  return "semantics";
}

std::optional<CorrectionClass>
correction_class_from_name(const std::string &s) {
  if (s == "syntax")
    return CorrectionClass::Syntax;
  if (s == "semantics")
    return CorrectionClass::Semantics;
  if (s == "both")
    return CorrectionClass::Both;
  return std::nullopt;
}

ScriptedHumanIo ScriptedHumanIo::from_file(const std::string &path) {
  return from_json_text(read_file(path), path);
}

ScriptedHumanIo ScriptedHumanIo::from_json_text(const std::string &json_text,
                                                const std::string &origin) {
  ScriptedHumanIo io;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception &e) {
    throw std::runtime_error("human script " + origin + ": " + e.what());
  }
  const json &records = j.is_array() ? j : j.at("records");
  for (const auto &rj : records) {
    Record r;
    if (rj.contains("program"))
      r.program = rj["program"].get<std::string>();
    std::string target = rj.at("target").get<std::string>();
    size_t colon = target.find(':');
    std::string what = target.substr(0, colon);
    if (colon == std::string::npos || (what != "segment" && what != "boundary"))
      throw std::runtime_error("human script " + origin +
                               ": target must be segment:<id> or "
                               "boundary:<id>, got " +
                               target);
    r.is_boundary = what == "boundary";
    r.id = std::stoi(target.substr(colon + 1));
    r.text = rj.at("text").get<std::string>();
    if (rj.contains("class")) {
      auto c = correction_class_from_name(rj["class"].get<std::string>());
      if (!c)
        throw std::runtime_error("human script " + origin +
                                 ": unknown correction class");
      r.correction_class = *c;
    }
    io.records_.push_back(std::move(r));
  }
  return io;
}

ScriptedHumanIo::Record *ScriptedHumanIo::find(const std::string &program,
                                               bool boundary, int id) {
  std::lock_guard<std::mutex> lock(mutex_);
  for (auto &r : records_) {
    if (r.consumed || r.is_boundary != boundary || r.id != id)
      continue;
    if (r.program && *r.program != program)
      continue;
    r.consumed = true;
    return &r;
  }
  return nullptr;
}

std::optional<std::string>
ScriptedHumanIo::edit_interface(const std::string &program, int boundary_id,
                                const std::string &) {
  if (Record *r = find(program, true, boundary_id))
    return r->text;
  return std::nullopt;
}

std::optional<std::string>
ScriptedHumanIo::provide_interface(const std::string &program,
                                   int boundary_id) {
  if (Record *r = find(program, true, boundary_id))
    return r->text;
  return std::nullopt;
}

std::optional<HumanEdit>
ScriptedHumanIo::complete_proof(const std::string &program, int segment_id,
                                const std::string &,
                                const std::vector<Diagnostic> &) {
  if (Record *r = find(program, false, segment_id))
    return HumanEdit{r->text, r->correction_class};
  return std::nullopt;
}

EditorHumanIo::EditorHumanIo(std::string editor_cmd)
    : editor_cmd_(std::move(editor_cmd)) {
  if (editor_cmd_.empty()) {
    const char *env = std::getenv("EDITOR");
    editor_cmd_ = env ? env : "";
  }
}

std::optional<std::string> EditorHumanIo::edit_text(const std::string &initial,
                                                    const std::string &header) {
  if (editor_cmd_.empty())
    return std::nullopt;
  namespace fs = std::filesystem;
  std::random_device rd;
  fs::path file = fs::temp_directory_path() /
                  ("proofsmith-edit-" + std::to_string(rd()) + ".rs");
  std::string content;
  for (const auto &line : split_lines(header))
    content += "// " + line + "\n";
  content += initial;
  write_file(file.string(), content);
  std::string cmd = editor_cmd_ + " " + file.string();
  int rc = std::system(cmd.c_str());
  if (rc != 0) {
    std::error_code ec;
    fs::remove(file, ec);
    return std::nullopt;
  }
  std::string edited = read_file(file.string());
  std::error_code ec;
  fs::remove(file, ec);
  // strip the instruction header we prepended
  std::vector<std::string> lines = split_lines(edited);
  size_t skip = 0;
  size_t header_lines = split_lines(header).size();
  while (skip < lines.size() && skip < header_lines &&
         starts_with(trim(lines[skip]), "//"))
    skip++;
  std::vector<std::string> rest(lines.begin() + skip, lines.end());
  return join_lines(rest) + "\n";
}

std::optional<std::string>
EditorHumanIo::edit_interface(const std::string &program, int boundary_id,
                              const std::string &proposed) {
  auto edited = edit_text(
      proposed, "Edit the interface clauses for " + program + " boundary " +
                    std::to_string(boundary_id) +
                    " (one clause per line), then save and exit.");
  return edited;
}

std::optional<std::string>
EditorHumanIo::provide_interface(const std::string &program, int boundary_id) {
  return edit_interface(program, boundary_id, "");
}

std::optional<HumanEdit>
EditorHumanIo::complete_proof(const std::string &program, int segment_id,
                              const std::string &best,
                              const std::vector<Diagnostic> &diags) {
  std::string header = "Complete the proof for " + program + " segment " +
                       std::to_string(segment_id) +
                       ". Verifier errors:\n" + format_diagnostics(diags) +
                       "Save and exit when done.";
  auto edited = edit_text(best, header);
  if (!edited)
    return std::nullopt;
  HumanEdit e;
  e.text = *edited;
  std::cout << "Classify the correction [syntax/semantics/both] (default "
               "semantics): "
            << std::flush;
  std::string answer;
  std::getline(std::cin, answer);
  if (auto c = correction_class_from_name(trim(answer)))
    e.correction_class = *c;
  return e;
}

} // namespace proofsmith
