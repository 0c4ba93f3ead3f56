#include "bench/gateway.hpp"

#include <condition_variable>
#include <cstdlib>
#include <thread>

#include "bench/error.hpp"
#include "bench/util.hpp"

namespace bench {

const char* to_string(Role r) {
  switch (r) {
    case Role::designer: return "designer";
    case Role::answerer: return "answerer";
    case Role::judge: return "judge";
  }
  return "?";
}

DecodeParams default_decode(Role role) {
  DecodeParams d;
  d.temperature = role == Role::designer ? 0.8 : 0.0;
  return d;
}

std::string request_digest(const CompletionRequest& req) {
  ojson j;
  j["model"] = req.model.name;
  j["role"] = to_string(req.role);
  j["system"] = req.system;
  j["user"] = req.user;
  j["temperature"] = req.decode.temperature;
  j["max_tokens"] = req.decode.max_tokens;
  return sha256_hex(j.dump());
}

// --- transcript ---------------------------------------------------------------

TranscriptLog::TranscriptLog(std::filesystem::path path) : path_(std::move(path)) {
  for (const auto& line : read_lines(path_)) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    if (j.contains("digest") && j.contains("response")) {
      cache_[j["digest"].get<std::string>()] = j["response"].get<std::string>();
      if (j.contains("role")) role_counts_[j["role"].get<std::string>()]++;
    }
  }
}

std::optional<std::string> TranscriptLog::lookup(const std::string& digest) const {
  std::lock_guard lock(mu_);
  auto it = cache_.find(digest);
  if (it == cache_.end()) return std::nullopt;
  return it->second;
}

void TranscriptLog::record(const CompletionRequest& req, const std::string& digest,
                           const CompletionResult& result, std::int64_t started_ms,
                           std::int64_t finished_ms) {
  std::lock_guard lock(mu_);
  if (cache_.count(digest)) return;  // already on disk
  ojson j;
  j["digest"] = digest;
  j["role"] = to_string(req.role);
  j["model"] = req.model.name;
  j["temperature"] = req.decode.temperature;
  j["max_tokens"] = req.decode.max_tokens;
  j["response"] = result.text;
  j["retries"] = result.retries;
  j["usage"] = result.usage;
  j["started_ms"] = started_ms;
  j["finished_ms"] = finished_ms;
  append_line(path_, j.dump());
  cache_[digest] = result.text;
  role_counts_[to_string(req.role)]++;
}

int TranscriptLog::count_role(Role role) const {
  std::lock_guard lock(mu_);
  auto it = role_counts_.find(to_string(role));
  return it == role_counts_.end() ? 0 : it->second;
}

// --- gateway -------------------------------------------------------------------

// Counting semaphore pinning per-provider concurrency.
struct Gateway::ProviderGate {
  std::mutex mu;
  std::condition_variable cv;
  int in_flight = 0;
  int cap = 1;

  void acquire() {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return in_flight < cap; });
    ++in_flight;
  }
  void release() {
    {
      std::lock_guard lock(mu);
      --in_flight;
    }
    cv.notify_one();
  }
};

Gateway::Gateway(std::map<std::string, BackendProfile> profiles,
                 std::map<std::string, std::shared_ptr<Backend>> backends,
                 std::shared_ptr<TranscriptLog> transcript)
    : Gateway(std::move(profiles), std::move(backends), std::move(transcript), Options{}) {}

Gateway::Gateway(std::map<std::string, BackendProfile> profiles,
                 std::map<std::string, std::shared_ptr<Backend>> backends,
                 std::shared_ptr<TranscriptLog> transcript, Options options)
    : profiles_(std::move(profiles)),
      backends_(std::move(backends)),
      transcript_(std::move(transcript)),
      options_(std::move(options)) {
  for (const auto& [provider, profile] : profiles_) {
    auto gate = std::make_unique<ProviderGate>();
    gate->cap = std::max(1, profile.max_in_flight);
    gates_[provider] = std::move(gate);
  }
  if (!options_.sleep_fn)
    options_.sleep_fn = [](std::chrono::milliseconds ms) { std::this_thread::sleep_for(ms); };
}

Gateway::~Gateway() = default;

const BackendProfile& Gateway::profile(const std::string& provider) const {
  auto it = profiles_.find(provider);
  if (it == profiles_.end())
    throw Error(Errc::config_error, "unknown provider '" + provider + "'");
  return it->second;
}

CompletionResult Gateway::complete(const std::string& provider, Role role,
                                   const ModelId& model, const std::string& system,
                                   const std::string& user, const ojson& sim_context) {
  const BackendProfile& prof = profile(provider);
  auto backend = backends_.find(provider);
  if (backend == backends_.end())
    throw Error(Errc::config_error, "no backend registered for '" + provider + "'");

  CompletionRequest req;
  req.role = role;
  req.model = model;
  req.system = system;
  req.user = user;
  req.decode = prof.decode_override ? *prof.decode_override : default_decode(role);
  req.sim_context = sim_context;

  std::string digest = request_digest(req);
  if (options_.use_cache) {
    if (auto hit = transcript_->lookup(digest)) {
      CompletionResult res;
      res.text = *hit;
      res.from_cache = true;
      return res;
    }
  }

  ProviderGate& gate = *gates_.at(provider);
  int attempt = 0;
  std::chrono::milliseconds delay = prof.backoff_base;
  while (true) {
    gate.acquire();
    auto started = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
    try {
      CompletionResult res = backend->second->complete(req);
      res.retries = attempt;
      auto finished = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::system_clock::now().time_since_epoch())
                          .count();
      gate.release();
      transcript_->record(req, digest, res, started, finished);
      return res;
    } catch (const TransientBackendError& e) {
      gate.release();
      if (attempt >= prof.max_retries)
        throw Error(Errc::provider_exhausted,
                    provider + " failed after " + std::to_string(attempt + 1) +
                        " attempts: " + e.what());
      options_.sleep_fn(delay);
      delay = std::min(prof.backoff_ceiling, delay * 2);
      ++attempt;
    } catch (...) {
      gate.release();
      throw;
    }
  }
}

// --- http backend ---------------------------------------------------------------

HttpBackend::HttpBackend(BackendProfile profile) : profile_(std::move(profile)) {}

}  // namespace bench
