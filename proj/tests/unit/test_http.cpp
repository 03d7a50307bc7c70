#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "errors.hpp"
#include "openai_backend.hpp"
#include "retrieval.hpp"

using namespace specforge;
using nlohmann::json;

namespace {

// Local HTTP server on an ephemeral port, stopped on destruction.
class TestServer {
 public:
  TestServer() {
    port_ = server.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~TestServer() {
    server.stop();
    thread_.join();
  }
  std::string url(const std::string& path = "") const { return "http://127.0.0.1:" + std::to_string(port_) + path; }

  httplib::Server server;

 private:
  int port_ = 0;
  std::thread thread_;
};

GatewayOptions fast() {
  GatewayOptions o;
  o.backoff = std::chrono::milliseconds(1);
  o.max_retries = 2;
  return o;
}

ChatRequest request() {
  ChatRequest r;
  r.system_prompt = "system text";
  r.user_prompt = "user text";
  r.tag = "draft_background";
  r.max_output_tokens = 321;
  return r;
}

}  // namespace

TEST_SUITE("http") {
  TEST_CASE("chat completions wire format") {
    TestServer ts;
    json seen;
    std::string auth;
    ts.server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
      seen = json::parse(req.body);
      auth = req.get_header_value("Authorization");
      res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"drafted text"}}]})", "application/json");
    });
    OpenAIEndpoint ep;
    ep.base_url = ts.url("/v1/");
    ep.model = "local-model";
    ep.api_key = "secret-token";
    Gateway gw(std::make_shared<OpenAIBackend>(ep), fast());
    CHECK(gw.chat(request()) == "drafted text");
    CHECK(seen["model"] == "local-model");
    CHECK(seen["max_tokens"] == 321);
    CHECK(seen["temperature"] == 0.0);
    CHECK(seen["messages"][0]["role"] == "system");
    CHECK(seen["messages"][0]["content"] == "system text");
    CHECK(seen["messages"][1]["content"] == "user text");
    CHECK(auth == "Bearer secret-token");
  }

  TEST_CASE("embeddings wire format") {
    TestServer ts;
    json seen;
    ts.server.Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
      seen = json::parse(req.body);
      res.set_content(R"({"data":[{"embedding":[0.6,0.8,0.0]}]})", "application/json");
    });
    OpenAIEndpoint ep;
    ep.base_url = ts.url("/v1");
    ep.embedding_model = "embedder";
    Gateway gw(std::make_shared<OpenAIBackend>(ep), fast());
    CHECK(gw.embed("chunk text").values == std::vector<double>{0.6, 0.8, 0.0});
    CHECK(seen["model"] == "embedder");
    CHECK(seen["input"] == "chunk text");
  }

  TEST_CASE("server errors are retried, client errors are not") {
    TestServer ts;
    std::atomic<int> hits{0};
    ts.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
      const int n = ++hits;
      if (n < 3) {
        res.status = 503;
        return;
      }
      res.set_content(R"({"choices":[{"message":{"content":"third time"}}]})", "application/json");
    });
    ts.server.Post("/v2/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
      ++hits;
      res.status = 401;
      res.set_content("unauthorized", "text/plain");
    });
    OpenAIEndpoint ep;
    ep.base_url = ts.url("/v1");
    ep.model = "m";
    Gateway gw(std::make_shared<OpenAIBackend>(ep), fast());
    CHECK(gw.chat(request()) == "third time");
    CHECK(hits == 3);

    hits = 0;
    ep.base_url = ts.url("/v2");
    Gateway gw2(std::make_shared<OpenAIBackend>(ep), fast());
    try {
      gw2.chat(request());
      FAIL("expected BackendUnavailable");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BackendUnavailable);
    }
    CHECK(hits == 1);
  }

  TEST_CASE("malformed responses are reported") {
    TestServer ts;
    ts.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"unexpected":true})", "application/json");
    });
    OpenAIEndpoint ep;
    ep.base_url = ts.url("/v1");
    ep.model = "m";
    Gateway gw(std::make_shared<OpenAIBackend>(ep), fast());
    CHECK_THROWS_AS(gw.chat(request()), Error);
  }

  TEST_CASE("unreachable endpoint gives BackendUnavailable after retries") {
    int port = 0;
    {
      TestServer ts;
      port = std::stoi(ts.url().substr(ts.url().rfind(':') + 1));
    }
    OpenAIEndpoint ep;
    ep.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
    ep.model = "m";
    ep.timeout = std::chrono::seconds(2);
    Gateway gw(std::make_shared<OpenAIBackend>(ep), fast());
    try {
      gw.chat(request());
      FAIL("expected BackendUnavailable");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BackendUnavailable);
    }
    CHECK(gw.log().entries().back().attempts == 3);
  }

  TEST_CASE("web search provider") {
    TestServer ts;
    json seen;
    ts.server.Post("/search", [&](const httplib::Request& req, httplib::Response& res) {
      seen = json::parse(req.body);
      res.set_content(R"({"results":[{"url":"https://example.org/a","snippet":"Canned snippet about spools."}]})",
                      "application/json");
    });
    ts.server.Post("/empty", [&](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"results":[]})", "application/json");
    });
    WebSearchProvider web(ts.url("/search"), "k");
    const RetrievedDoc doc = web.search({"spool valve", "metering"});
    CHECK(doc.url_or_path == "https://example.org/a");
    CHECK(doc.snippet == "Canned snippet about spools.");
    CHECK(seen["query"] == "spool valve metering");
    CHECK(seen["count"] == 1);

    WebSearchProvider empty(ts.url("/empty"), "");
    try {
      empty.search({"x", ""});
      FAIL("expected NoResults");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoResults);
    }
  }
}
