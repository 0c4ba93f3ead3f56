// Wire-level checks for the chat-completion backend against a local server.

#ifdef BENCH_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "bench/error.hpp"
#include "bench/gateway.hpp"

using namespace bench;

namespace {

struct LocalServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> hits{0};
  std::atomic<int> fail_first{0};  // respond 429 for this many requests

  LocalServer() {
    server.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                               httplib::Response& res) {
      hits++;
      if (fail_first.fetch_sub(1) > 0) {
        res.status = 429;
        res.set_content("slow down", "text/plain");
        return;
      }
      if (req.get_header_value("Authorization") != "Bearer sekrit") {
        res.status = 401;
        res.set_content("who are you", "text/plain");
        return;
      }
      json body = json::parse(req.body);
      std::string user = body["messages"].back()["content"].get<std::string>();
      ojson reply;
      reply["choices"] = ojson::array(
          {ojson{{"message", ojson{{"role", "assistant"}, {"content", "echo: " + user}}}}});
      res.set_content(reply.dump(), "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~LocalServer() {
    server.stop();
    thread.join();
  }
};

Gateway wire_gateway(const LocalServer& srv, int max_retries,
                     std::shared_ptr<TranscriptLog> transcript) {
  BackendProfile profile;
  profile.provider = "local";
  profile.base_url = "http://127.0.0.1:" + std::to_string(srv.port) + "/v1";
  profile.api_key_env = "BENCH_TEST_KEY";
  profile.max_in_flight = 4;
  profile.max_retries = max_retries;
  profile.backoff_base = std::chrono::milliseconds(1);
  profile.backoff_ceiling = std::chrono::milliseconds(4);
  auto backend = std::make_shared<HttpBackend>(profile);
  Gateway::Options opts;
  opts.sleep_fn = [](std::chrono::milliseconds) {};
  return Gateway({{"local", profile}}, {{"local", backend}}, transcript, opts);
}

std::filesystem::path temp_transcript(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("bench_http_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir / "t.jsonl";
}

}  // namespace

TEST_CASE("chat completion round-trip with bearer auth from the environment") {
  setenv("BENCH_TEST_KEY", "sekrit", 1);
  LocalServer srv;
  auto transcript = std::make_shared<TranscriptLog>(temp_transcript("ok"));
  Gateway gw = wire_gateway(srv, 2, transcript);
  CompletionResult res = gw.complete("local", Role::answerer, ModelId{"gpt-5-mini", "gpt"},
                                     "system text", "hello wire");
  CHECK(res.text == "echo: hello wire");
  CHECK(srv.hits.load() == 1);
}

TEST_CASE("429 responses are retried until the server recovers") {
  setenv("BENCH_TEST_KEY", "sekrit", 1);
  LocalServer srv;
  srv.fail_first = 2;
  auto transcript = std::make_shared<TranscriptLog>(temp_transcript("retry"));
  Gateway gw = wire_gateway(srv, 4, transcript);
  CompletionResult res =
      gw.complete("local", Role::answerer, ModelId{"gpt-5-mini", "gpt"}, "", "again");
  CHECK(res.text == "echo: again");
  CHECK(res.retries == 2);
  CHECK(srv.hits.load() == 3);
}

TEST_CASE("persistent throttling exhausts the retry budget") {
  setenv("BENCH_TEST_KEY", "sekrit", 1);
  LocalServer srv;
  srv.fail_first = 100;
  auto transcript = std::make_shared<TranscriptLog>(temp_transcript("exhaust"));
  Gateway gw = wire_gateway(srv, 2, transcript);
  try {
    gw.complete("local", Role::answerer, ModelId{"gpt-5-mini", "gpt"}, "", "nope");
    FAIL("expected ProviderExhausted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::provider_exhausted);
  }
}

TEST_CASE("auth failures are nontransient config errors") {
  setenv("BENCH_TEST_KEY", "wrong-key", 1);
  LocalServer srv;
  auto transcript = std::make_shared<TranscriptLog>(temp_transcript("auth"));
  Gateway gw = wire_gateway(srv, 2, transcript);
  try {
    gw.complete("local", Role::answerer, ModelId{"gpt-5-mini", "gpt"}, "", "hi");
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::config_error);
  }
  CHECK(srv.hits.load() == 1);  // no retry on 401
}

TEST_CASE("missing key environment variable is a config error before any wire call") {
  unsetenv("BENCH_TEST_KEY");
  LocalServer srv;
  auto transcript = std::make_shared<TranscriptLog>(temp_transcript("nokey"));
  Gateway gw = wire_gateway(srv, 2, transcript);
  CHECK_THROWS_AS(
      gw.complete("local", Role::answerer, ModelId{"gpt-5-mini", "gpt"}, "", "hi"), Error);
  CHECK(srv.hits.load() == 0);
}
