#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "bench/types.hpp"

namespace bench {

enum class Role { designer, answerer, judge };
const char* to_string(Role r);

struct DecodeParams {
  double temperature = 0.0;
  int max_tokens = 4096;

  bool operator==(const DecodeParams&) const = default;
};

// Role defaults: designers sample, answering and judging are deterministic.
DecodeParams default_decode(Role role);

struct BackendProfile {
  std::string provider;
  std::string base_url;      // live backend only
  std::string api_key_env;   // environment variable holding the key
  int max_in_flight = 4;
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{250};
  std::chrono::milliseconds backoff_ceiling{8000};
  std::optional<DecodeParams> decode_override;
};

struct CompletionRequest {
  Role role = Role::answerer;
  ModelId model;
  std::string system;
  std::string user;
  DecodeParams decode;
  // Side-channel for the simulated backend; live backends ignore it and it
  // does not enter the request digest (the prompt text already identifies
  // the item).
  ojson sim_context = ojson(nullptr);
};

struct CompletionResult {
  std::string text;
  int retries = 0;
  bool from_cache = false;
  ojson usage = ojson(nullptr);  // provider token accounting, when reported
};

std::string request_digest(const CompletionRequest& req);

// Text-completion backend. Implementations must be safe for concurrent calls.
class Backend {
 public:
  virtual ~Backend() = default;
  // Throws ProviderExhausted / ConfigError.
  virtual CompletionResult complete(const CompletionRequest& req) = 0;
};

// Append-only JSONL transcript: one line per completed call, keyed by request
// digest. Doubles as the response cache for resume and replay.
class TranscriptLog {
 public:
  explicit TranscriptLog(std::filesystem::path path);

  std::optional<std::string> lookup(const std::string& digest) const;
  void record(const CompletionRequest& req, const std::string& digest,
              const CompletionResult& result, std::int64_t started_ms,
              std::int64_t finished_ms);
  // Counts transcript lines for a role (judge-invocation audits).
  int count_role(Role role) const;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::map<std::string, std::string> cache_;  // digest -> response text
  std::map<std::string, int> role_counts_;
};

// Uniform front door: per-provider admission caps, retry with exponential
// backoff, transcript caching. Backends are registered per provider label.
class Gateway {
 public:
  struct Options {
    bool use_cache = true;
    // Injected so tests do not sleep for real.
    std::function<void(std::chrono::milliseconds)> sleep_fn;
  };

  Gateway(std::map<std::string, BackendProfile> profiles,
          std::map<std::string, std::shared_ptr<Backend>> backends,
          std::shared_ptr<TranscriptLog> transcript);
  Gateway(std::map<std::string, BackendProfile> profiles,
          std::map<std::string, std::shared_ptr<Backend>> backends,
          std::shared_ptr<TranscriptLog> transcript, Options options);
  ~Gateway();

  // Applies role decode defaults (unless the profile overrides), admission
  // caps, retries, caching, and transcript recording.
  CompletionResult complete(const std::string& provider, Role role, const ModelId& model,
                            const std::string& system, const std::string& user,
                            const ojson& sim_context = ojson(nullptr));

  const BackendProfile& profile(const std::string& provider) const;
  TranscriptLog& transcript() { return *transcript_; }

 private:
  struct ProviderGate;
  std::map<std::string, BackendProfile> profiles_;
  std::map<std::string, std::shared_ptr<Backend>> backends_;
  std::map<std::string, std::unique_ptr<ProviderGate>> gates_;
  std::shared_ptr<TranscriptLog> transcript_;
  Options options_;
};

// Transient failure a backend may throw to trigger a retry.
struct TransientBackendError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Chat-completion HTTP backend (OpenAI-style request/response shape).
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(BackendProfile profile);
  CompletionResult complete(const CompletionRequest& req) override;

 private:
  BackendProfile profile_;
};

}  // namespace bench
