#include "proofsmith/llm_backend.hpp"

#include "proofsmith/text.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>

namespace proofsmith {

using nlohmann::json;

namespace {

std::string format_temperature(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", t);
  return buf;
}

} // namespace

std::string completion_fingerprint(const std::string &prompt,
                                   const std::string &model_id,
                                   double temperature) {
  std::string data = prompt;
  data += '\x1f';
  data += model_id;
  data += '\x1f';
  data += format_temperature(temperature);
  return fnv1a64_hex(data);
}

std::string serialize_transcript_record(const TranscriptRecord &rec) {
  json j;
  j["fingerprint"] = rec.fingerprint;
  j["model"] = rec.model_id;
  j["temperature"] = rec.temperature;
  j["prompt"] = rec.prompt;
  j["response"] = rec.response;
  j["timestamp"] = rec.timestamp;
  return j.dump();
}

std::vector<TranscriptRecord> load_transcript(const std::string &path) {
  std::vector<TranscriptRecord> records;
  std::string text = read_file(path);
  int line_no = 0;
  std::set<std::string> seen;
  for (const auto &line : split_lines(text)) {
    line_no++;
    if (trim(line).empty())
      continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception &e) {
      throw TranscriptError(path + ":" + std::to_string(line_no) + ": " +
                            e.what());
    }
    TranscriptRecord rec;
    try {
      rec.fingerprint = j.at("fingerprint").get<std::string>();
      rec.model_id = j.at("model").get<std::string>();
      rec.temperature = j.at("temperature").get<double>();
      rec.prompt = j.at("prompt").get<std::string>();
      rec.response = j.at("response").get<std::string>();
      rec.timestamp = j.value("timestamp", "");
    } catch (const json::exception &e) {
      throw TranscriptError(path + ":" + std::to_string(line_no) + ": " +
                            e.what());
    }
    std::string expect =
        completion_fingerprint(rec.prompt, rec.model_id, rec.temperature);
    if (expect != rec.fingerprint)
      throw TranscriptError(path + ":" + std::to_string(line_no) +
                            ": fingerprint " + rec.fingerprint +
                            " does not match its record (expected " + expect +
                            ")");
    if (!seen.insert(rec.fingerprint).second)
      throw TranscriptError(path + ":" + std::to_string(line_no) +
                            ": duplicate fingerprint " + rec.fingerprint);
    records.push_back(std::move(rec));
  }
  return records;
}

LiveBackend::LiveBackend(BackendConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.endpoint_url.empty())
    throw NetworkError("live backend needs an endpoint url");
}

std::string LiveBackend::complete(const CompletionRequest &req) {
  // split scheme://host[:port] from the path
  size_t scheme = cfg_.endpoint_url.find("://");
  if (scheme == std::string::npos)
    throw NetworkError("endpoint url has no scheme: " + cfg_.endpoint_url);
  size_t path_start = cfg_.endpoint_url.find('/', scheme + 3);
  std::string base = path_start == std::string::npos
                         ? cfg_.endpoint_url
                         : cfg_.endpoint_url.substr(0, path_start);
  std::string path = path_start == std::string::npos
                         ? std::string("/")
                         : cfg_.endpoint_url.substr(path_start);

  httplib::Client client(base);
  client.set_connection_timeout(cfg_.timeout_seconds, 0);
  client.set_read_timeout(cfg_.timeout_seconds, 0);
  client.set_write_timeout(cfg_.timeout_seconds, 0);

  httplib::Headers headers;
  if (!cfg_.api_key_source.empty()) {
    const char *key = std::getenv(cfg_.api_key_source.c_str());
    if (key && *key)
      headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  json body;
  body["model"] = cfg_.model_id;
  body["messages"] = json::array(
      {{{"role", "system"},
        {"content", "You are an expert in the Verus verification language "
                    "for Rust. Follow the task instructions exactly."}},
       {{"role", "user"}, {"content", req.prompt}}});
  body["temperature"] = req.temperature;
  body["max_tokens"] = cfg_.max_tokens;

  const int max_tries = 3;
  std::string last_error;
  for (int attempt = 0; attempt < max_tries; attempt++) {
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "http status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw NetworkError("http status " + std::to_string(res->status) + ": " +
                         res->body);
    try {
      json reply = json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content")
          .get<std::string>();
    } catch (const json::exception &e) {
      throw NetworkError(std::string("malformed completion response: ") +
                         e.what());
    }
  }
  throw NetworkError(last_error);
}

ReplayBackend::ReplayBackend(const std::string &transcript_path,
                             BackendConfig cfg)
    : cfg_(std::move(cfg)) {
  for (auto &rec : load_transcript(transcript_path))
    responses_[rec.fingerprint] = rec.response;
}

std::string ReplayBackend::complete(const CompletionRequest &req) {
  std::string fp =
      completion_fingerprint(req.prompt, cfg_.model_id, req.temperature);
  auto it = responses_.find(fp);
  if (it == responses_.end())
    throw MissingTranscript("no transcript entry " + fp + " for prompt: " +
                            req.prompt.substr(0, 80));
  return it->second;
}

MockBackend MockBackend::from_file(const std::string &path) {
  return from_json_text(read_file(path), path);
}

MockBackend MockBackend::from_json_text(const std::string &json_text,
                                        const std::string &origin) {
  MockBackend mock;
  mock.origin_ = origin;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception &e) {
    throw std::runtime_error("mock script " + origin + ": " + e.what());
  }
  const json &responses = j.is_array() ? j : j.at("responses");
  for (const auto &rj : responses) {
    Response r;
    if (rj.contains("program"))
      r.program = rj["program"].get<std::string>();
    std::string kind = rj.at("kind").get<std::string>();
    if (kind == "postcondition")
      r.kind = PromptKind::Postcondition;
    else if (kind == "proof")
      r.kind = PromptKind::Proof;
    else if (kind == "repair")
      r.kind = PromptKind::Repair;
    else
      throw std::runtime_error("mock script " + origin + ": unknown kind " +
                               kind);
    r.segment_id = rj.at("segment").get<int>();
    r.attempt = rj.value("attempt", 0);
    r.response = rj.at("response").get<std::string>();
    mock.responses_.push_back(std::move(r));
  }
  return mock;
}

std::string MockBackend::complete(const CompletionRequest &req) {
  for (const auto &r : responses_) {
    if (r.program && *r.program != req.program)
      continue;
    if (r.kind != req.kind || r.segment_id != req.segment_id ||
        r.attempt != req.attempt)
      continue;
    return r.response;
  }
  throw ScriptExhausted("mock script " + origin_ + ": no response for " +
                        req.program + "/" + prompt_kind_name(req.kind) +
                        " segment " + std::to_string(req.segment_id) +
                        " attempt " + std::to_string(req.attempt));
}

RecordingBackend::RecordingBackend(std::shared_ptr<CompletionBackend> inner,
                                   std::string transcript_path,
                                   BackendConfig cfg)
    : inner_(std::move(inner)), path_(std::move(transcript_path)),
      cfg_(std::move(cfg)) {}

std::string RecordingBackend::complete(const CompletionRequest &req) {
  std::string response = inner_->complete(req);
  TranscriptRecord rec;
  rec.fingerprint =
      completion_fingerprint(req.prompt, cfg_.model_id, req.temperature);
  rec.model_id = cfg_.model_id;
  rec.temperature = req.temperature;
  rec.prompt = req.prompt;
  rec.response = response;
  rec.timestamp = iso8601_now();
  std::lock_guard<std::mutex> lock(mutex_);
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out)
    throw TranscriptError("cannot append to transcript " + path_);
  out << serialize_transcript_record(rec) << "\n";
  return response;
}

} // namespace proofsmith
