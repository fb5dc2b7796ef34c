#ifndef PROOFSMITH_CONFIG_HPP
#define PROOFSMITH_CONFIG_HPP

#include "proofsmith/human_io.hpp"
#include "proofsmith/llm_backend.hpp"
#include "proofsmith/pipeline.hpp"
#include "proofsmith/verifier_driver.hpp"

#include <memory>
#include <optional>
#include <string>

namespace proofsmith {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key = value configuration; precedence is flag > file > default.
struct ToolConfig {
  // completion backend
  std::string backend = "live"; // live | replay | mock
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4";
  double temperature = 0.0;
  double escalated_temperature = 0.5;
  int max_tokens = 2048;
  int timeout_s = 120;
  std::string api_key_env = "OPENAI_API_KEY";
  std::string transcript_path; // replay source; recording sink otherwise
  std::string script_path;     // mock backend script

  // verifier
  std::string verifier = "real"; // real | stub
  std::string verifier_cmd = "verus";
  std::string stub_script;
  int verify_timeout_s = 60;

  // pipeline
  int max_repairs = 1;
  int max_format_retries = 1;
  bool propagate_eagerly = false;
  bool non_interactive = false;
  std::string editor_cmd;
  std::string human_script;
  std::string fewshot_dir;
  std::string granularity = "fine"; // fine | coarse
  long max_prompt_chars = 200000;

  // bench
  int jobs = 1;

  Granularity granularity_value() const;
  BackendConfig backend_config() const;
  AttemptPolicy attempt_policy() const;
  // replay or mock backend plus stub verifier: timing and timestamps are
  // zeroed so reports are byte-identical across runs
  bool hermetic() const { return backend != "live" && verifier == "stub"; }
};

// Applies key = value lines from `path` on top of `cfg`. '#' starts a
// comment; unknown keys are ConfigErrors.
void apply_config_file(ToolConfig &cfg, const std::string &path);
void apply_config_entry(ToolConfig &cfg, const std::string &key,
                        const std::string &value);
void validate_config(const ToolConfig &cfg);

std::shared_ptr<CompletionBackend> make_backend(const ToolConfig &cfg);
std::unique_ptr<Verifier>
make_verifier(const ToolConfig &cfg,
              const std::optional<std::string> &stub_override = std::nullopt);
std::unique_ptr<HumanIo> make_human_io(const ToolConfig &cfg);

// Few-shot example sets for the three prompt kinds from cfg.fewshot_dir.
void load_examples_into(PipelineOptions &opts, const ToolConfig &cfg);

} // namespace proofsmith

#endif
