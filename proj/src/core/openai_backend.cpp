#include "openai_backend.hpp"

#include <json.hpp>

#include "errors.hpp"
#include "http_transport.hpp"

namespace specforge {

using nlohmann::json;

OpenAIBackend::OpenAIBackend(OpenAIEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  while (!endpoint_.base_url.empty() && endpoint_.base_url.back() == '/') endpoint_.base_url.pop_back();
  if (endpoint_.base_url.empty()) fail(ErrorCode::InvalidInput, "OpenAI-compatible backend needs a base_url");
}

std::string OpenAIBackend::post(const std::string& path, const std::string& body) {
  HttpHeaders headers;
  if (!endpoint_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + endpoint_.api_key);
  const HttpResponse res = http_post_json(endpoint_.base_url + path, headers, body, endpoint_.timeout);
  if (res.status != 200) {
    fail(ErrorCode::BackendUnavailable,
         endpoint_.base_url + path + " returned HTTP " + std::to_string(res.status) + ": " + res.body.substr(0, 300));
  }
  return res.body;
}

std::string OpenAIBackend::complete(const ChatRequest& request) {
  json body = {
      {"model", endpoint_.model},
      {"messages",
       json::array({{{"role", "system"}, {"content", request.system_prompt}},
                    {{"role", "user"}, {"content", request.user_prompt}}})},
      {"max_tokens", request.max_output_tokens},
      {"temperature", request.temperature},
      {"stream", false},
  };
  const std::string raw = post("/chat/completions", body.dump());
  try {
    const json reply = json::parse(raw);
    const json& content = reply.at("choices").at(0).at("message").at("content");
    return content.is_null() ? std::string() : content.get<std::string>();
  } catch (const json::exception& e) {
    fail(ErrorCode::BackendUnavailable, std::string("malformed chat completion response: ") + e.what());
  }
}

std::vector<double> OpenAIBackend::embed(std::string_view text) {
  json body = {{"model", endpoint_.embedding_model}, {"input", std::string(text)}};
  const std::string raw = post("/embeddings", body.dump());
  try {
    const json reply = json::parse(raw);
    return reply.at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const json::exception& e) {
    fail(ErrorCode::BackendUnavailable, std::string("malformed embeddings response: ") + e.what());
  }
}

}  // namespace specforge
