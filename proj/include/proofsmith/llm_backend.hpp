#ifndef PROOFSMITH_LLM_BACKEND_HPP
#define PROOFSMITH_LLM_BACKEND_HPP

#include "proofsmith/prompting.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace proofsmith {

// Pluggable completion backends: a live chat-completion client, a
// deterministic transcript replay, and a scripted mock keyed on
// (program, template kind, segment, attempt).

struct BackendConfig {
  std::string endpoint_url;
  std::string model_id = "gpt-4";
  double temperature = 0.0; // [0, 2]
  int max_tokens = 2048;
  int timeout_seconds = 120;
  std::string api_key_source = "OPENAI_API_KEY"; // env var holding the key
};

struct CompletionRequest {
  std::string prompt;
  PromptKind kind = PromptKind::Proof;
  std::string program;  // program stem, used by the mock matcher
  int segment_id = 0;   // boundary id for postcondition prompts
  int attempt = 0;      // per (program, kind, segment) call ordinal
  double temperature = 0.0;
};

struct NetworkError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingTranscript : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ScriptExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TranscriptError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Hash of (prompt, model, temperature); distinct temperatures give distinct
// transcript entries so the escalation retry path replays unambiguously.
std::string completion_fingerprint(const std::string &prompt,
                                   const std::string &model_id,
                                   double temperature);

struct TranscriptRecord {
  std::string fingerprint;
  std::string model_id;
  double temperature = 0.0;
  std::string prompt;
  std::string response;
  std::string timestamp;
};

// Line-delimited JSON, one record per line. Loading rejects fingerprints
// that are not recomputable from the stored fields and duplicate
// fingerprints.
std::vector<TranscriptRecord> load_transcript(const std::string &path);
std::string serialize_transcript_record(const TranscriptRecord &rec);

class CompletionBackend {
public:
  virtual ~CompletionBackend() = default;
  virtual std::string complete(const CompletionRequest &req) = 0;
  virtual std::string name() const = 0;
};

class LiveBackend : public CompletionBackend {
public:
  explicit LiveBackend(BackendConfig cfg);
  std::string complete(const CompletionRequest &req) override;
  std::string name() const override { return "live"; }

private:
  BackendConfig cfg_;
};

class ReplayBackend : public CompletionBackend {
public:
  ReplayBackend(const std::string &transcript_path, BackendConfig cfg);
  std::string complete(const CompletionRequest &req) override;
  std::string name() const override { return "replay"; }

private:
  std::map<std::string, std::string> responses_; // fingerprint -> response
  BackendConfig cfg_;
};

class MockBackend : public CompletionBackend {
public:
  static MockBackend from_file(const std::string &path);
  static MockBackend from_json_text(const std::string &json_text,
                                    const std::string &origin);
  std::string complete(const CompletionRequest &req) override;
  std::string name() const override { return "mock"; }

  struct Response {
    std::optional<std::string> program;
    PromptKind kind = PromptKind::Proof;
    int segment_id = 0;
    int attempt = 0;
    std::string response;
  };
  void add(Response r) { responses_.push_back(std::move(r)); }

private:
  std::vector<Response> responses_;
  std::string origin_;
};

// Wraps another backend and appends one transcript record per completion.
class RecordingBackend : public CompletionBackend {
public:
  RecordingBackend(std::shared_ptr<CompletionBackend> inner,
                   std::string transcript_path, BackendConfig cfg);
  std::string complete(const CompletionRequest &req) override;
  std::string name() const override { return inner_->name(); }

private:
  std::shared_ptr<CompletionBackend> inner_;
  std::string path_;
  BackendConfig cfg_;
  std::mutex mutex_;
};

} // namespace proofsmith

#endif
