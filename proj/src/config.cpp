#include "proofsmith/config.hpp"

#include "proofsmith/text.hpp"

#include <map>

namespace proofsmith {

Granularity ToolConfig::granularity_value() const {
  if (granularity == "fine")
    return Granularity::Fine;
  if (granularity == "coarse")
    return Granularity::Coarse;
  throw ConfigError("granularity must be fine or coarse, got " + granularity);
}

BackendConfig ToolConfig::backend_config() const {
  BackendConfig b;
  b.endpoint_url = endpoint;
  b.model_id = model;
  b.temperature = temperature;
  b.max_tokens = max_tokens;
  b.timeout_seconds = timeout_s;
  b.api_key_source = api_key_env;
  return b;
}

AttemptPolicy ToolConfig::attempt_policy() const {
  AttemptPolicy p;
  p.max_repair_attempts = max_repairs;
  p.base_temperature = temperature;
  p.escalated_temperature = escalated_temperature;
  p.max_format_retries = max_format_retries;
  return p;
}

namespace {

bool parse_bool(const std::string &key, const std::string &value) {
  if (value == "true" || value == "1" || value == "yes")
    return true;
  if (value == "false" || value == "0" || value == "no")
    return false;
  throw ConfigError(key + " must be true or false, got " + value);
}

long parse_int(const std::string &key, const std::string &value) {
  try {
    size_t used = 0;
    long v = std::stol(value, &used);
    if (used != value.size())
      throw std::invalid_argument(value);
    return v;
  } catch (const std::exception &) {
    throw ConfigError(key + " must be an integer, got " + value);
  }
}

double parse_double(const std::string &key, const std::string &value) {
  try {
    size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size())
      throw std::invalid_argument(value);
    return v;
  } catch (const std::exception &) {
    throw ConfigError(key + " must be a number, got " + value);
  }
}

} // namespace

void apply_config_entry(ToolConfig &cfg, const std::string &key,
                        const std::string &value) {
  if (key == "backend")
    cfg.backend = value;
  else if (key == "endpoint")
    cfg.endpoint = value;
  else if (key == "model")
    cfg.model = value;
  else if (key == "temperature")
    cfg.temperature = parse_double(key, value);
  else if (key == "escalated_temperature")
    cfg.escalated_temperature = parse_double(key, value);
  else if (key == "max_tokens")
    cfg.max_tokens = static_cast<int>(parse_int(key, value));
  else if (key == "timeout_s")
    cfg.timeout_s = static_cast<int>(parse_int(key, value));
  else if (key == "api_key_env")
    cfg.api_key_env = value;
  else if (key == "transcript_path")
    cfg.transcript_path = value;
  else if (key == "script_path")
    cfg.script_path = value;
  else if (key == "verifier")
    cfg.verifier = value;
  else if (key == "verifier_cmd")
    cfg.verifier_cmd = value;
  else if (key == "stub_script")
    cfg.stub_script = value;
  else if (key == "verify_timeout_s")
    cfg.verify_timeout_s = static_cast<int>(parse_int(key, value));
  else if (key == "max_repairs")
    cfg.max_repairs = static_cast<int>(parse_int(key, value));
  else if (key == "max_format_retries")
    cfg.max_format_retries = static_cast<int>(parse_int(key, value));
  else if (key == "propagate_eagerly")
    cfg.propagate_eagerly = parse_bool(key, value);
  else if (key == "non_interactive")
    cfg.non_interactive = parse_bool(key, value);
  else if (key == "editor_cmd")
    cfg.editor_cmd = value;
  else if (key == "human_script")
    cfg.human_script = value;
  else if (key == "fewshot_dir")
    cfg.fewshot_dir = value;
  else if (key == "granularity")
    cfg.granularity = value;
  else if (key == "max_prompt_chars")
    cfg.max_prompt_chars = parse_int(key, value);
  else if (key == "jobs")
    cfg.jobs = static_cast<int>(parse_int(key, value));
  else
    throw ConfigError("unknown config key: " + key);
}

void apply_config_file(ToolConfig &cfg, const std::string &path) {
  std::string text = read_file(path);
  int line_no = 0;
  for (const auto &raw : split_lines(text)) {
    line_no++;
    std::string line = raw;
    size_t hash = line.find('#');
    if (hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty())
      continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      apply_config_entry(cfg, key, value);
    } catch (const ConfigError &e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
}

void validate_config(const ToolConfig &cfg) {
  if (cfg.backend != "live" && cfg.backend != "replay" && cfg.backend != "mock")
    throw ConfigError("backend must be live, replay or mock, got " +
                      cfg.backend);
  if (cfg.verifier != "real" && cfg.verifier != "stub")
    throw ConfigError("verifier must be real or stub, got " + cfg.verifier);
  if (cfg.temperature < 0.0 || cfg.temperature > 2.0)
    throw ConfigError("temperature must be within [0, 2]");
  if (cfg.escalated_temperature < 0.0 || cfg.escalated_temperature > 2.0)
    throw ConfigError("escalated_temperature must be within [0, 2]");
  if (cfg.timeout_s <= 0 || cfg.verify_timeout_s <= 0)
    throw ConfigError("timeouts must be positive");
  if (cfg.max_repairs < 0 || cfg.max_format_retries < 0)
    throw ConfigError("attempt counts must be >= 0");
  if (cfg.jobs < 1)
    throw ConfigError("jobs must be >= 1");
  if (cfg.backend == "replay" && cfg.transcript_path.empty())
    throw ConfigError("replay backend needs transcript_path");
  if (cfg.backend == "mock" && cfg.script_path.empty())
    throw ConfigError("mock backend needs script_path");
  cfg.granularity_value();
}

std::shared_ptr<CompletionBackend> make_backend(const ToolConfig &cfg) {
  std::shared_ptr<CompletionBackend> inner;
  if (cfg.backend == "mock")
    inner = std::make_shared<MockBackend>(
        MockBackend::from_file(cfg.script_path));
  else if (cfg.backend == "replay")
    inner = std::make_shared<ReplayBackend>(cfg.transcript_path,
                                            cfg.backend_config());
  else
    inner = std::make_shared<LiveBackend>(cfg.backend_config());
  if (cfg.backend != "replay" && !cfg.transcript_path.empty())
    return std::make_shared<RecordingBackend>(inner, cfg.transcript_path,
                                              cfg.backend_config());
  return inner;
}

std::unique_ptr<Verifier>
make_verifier(const ToolConfig &cfg,
              const std::optional<std::string> &stub_override) {
  if (cfg.verifier == "stub") {
    std::string script = stub_override.value_or(cfg.stub_script);
    if (script.empty())
      throw ConfigError("stub verifier needs stub_script");
    return std::make_unique<StubVerifier>(StubVerifier::from_file(script));
  }
  RealVerifierConfig rc;
  rc.command = cfg.verifier_cmd;
  rc.timeout_seconds = cfg.verify_timeout_s;
  return std::make_unique<RealVerifier>(rc);
}

std::unique_ptr<HumanIo> make_human_io(const ToolConfig &cfg) {
  if (!cfg.human_script.empty())
    return std::make_unique<ScriptedHumanIo>(
        ScriptedHumanIo::from_file(cfg.human_script));
  if (cfg.non_interactive)
    return std::make_unique<NonInteractiveHumanIo>();
  return std::make_unique<EditorHumanIo>(cfg.editor_cmd);
}

void load_examples_into(PipelineOptions &opts, const ToolConfig &cfg) {
  opts.postcondition_examples =
      load_fewshot_examples(cfg.fewshot_dir, PromptKind::Postcondition);
  opts.proof_examples = load_fewshot_examples(cfg.fewshot_dir,
                                              PromptKind::Proof);
  opts.repair_examples = load_fewshot_examples(cfg.fewshot_dir,
                                               PromptKind::Repair);
}

} // namespace proofsmith
