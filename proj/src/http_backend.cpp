// Chat-completion wire backend. Kept in its own TU: httplib is heavy and the
// rest of the library must not pay for it.

#ifdef BENCH_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <cstdlib>

#include "bench/error.hpp"
#include "bench/gateway.hpp"

namespace bench {

namespace {

// scheme://host[:port] prefix and the path remainder
std::pair<std::string, std::string> split_base_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw Error(Errc::config_error, "base_url must include a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, ""};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

CompletionResult HttpBackend::complete(const CompletionRequest& req) {
  auto [host, base_path] = split_base_url(profile_.base_url);

  const char* key = nullptr;
  if (!profile_.api_key_env.empty()) {
    key = std::getenv(profile_.api_key_env.c_str());
    if (!key)
      throw Error(Errc::config_error,
                  "environment variable " + profile_.api_key_env + " is not set");
  }

  ojson body;
  body["model"] = req.model.name;
  ojson messages = ojson::array();
  if (!req.system.empty()) messages.push_back({{"role", "system"}, {"content", req.system}});
  messages.push_back({{"role", "user"}, {"content", req.user}});
  body["messages"] = messages;
  body["temperature"] = req.decode.temperature;
  body["max_tokens"] = req.decode.max_tokens;

  httplib::Client cli(host);
  cli.set_connection_timeout(30);
  cli.set_read_timeout(300);
  httplib::Headers headers;
  if (key) headers.emplace("Authorization", std::string("Bearer ") + key);

  auto res = cli.Post(base_path + "/chat/completions", headers, body.dump(),
                      "application/json");
  if (!res) throw TransientBackendError("connection failure to " + host);
  if (res->status == 429 || res->status >= 500)
    throw TransientBackendError("HTTP " + std::to_string(res->status));
  if (res->status != 200)
    throw Error(Errc::config_error,
                "HTTP " + std::to_string(res->status) + " from " + host + ": " + res->body);

  json reply = json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty())
    throw TransientBackendError("malformed completion payload");
  const auto& msg = reply["choices"][0];
  if (!msg.contains("message") || !msg["message"].contains("content"))
    throw TransientBackendError("completion payload missing message content");

  CompletionResult out;
  out.text = msg["message"]["content"].get<std::string>();
  if (reply.contains("usage")) out.usage = ojson(reply["usage"]);
  return out;
}

}  // namespace bench
