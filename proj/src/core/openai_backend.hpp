#pragma once

#include <chrono>
#include <string>

#include "llm_gateway.hpp"

namespace specforge {

struct OpenAIEndpoint {
  // Base URL up to and including the version segment, e.g. "http://localhost:8000/v1".
  std::string base_url = "http://localhost:8000/v1";
  std::string model;
  std::string embedding_model;
  std::string api_key;
  // 0 means "learn from the first embedding response".
  size_t embedding_dimension = 0;
  std::chrono::seconds timeout{120};
};

// Speaks the OpenAI-compatible /chat/completions and /embeddings schemas, so
// it works against vLLM, llama.cpp server, Ollama and hosted services alike.
class OpenAIBackend : public Backend {
 public:
  explicit OpenAIBackend(OpenAIEndpoint endpoint);

  std::string complete(const ChatRequest& request) override;
  std::vector<double> embed(std::string_view text) override;
  size_t embedding_dimension() const override { return endpoint_.embedding_dimension; }
  std::string name() const override { return endpoint_.base_url; }

 private:
  std::string post(const std::string& path, const std::string& body);

  OpenAIEndpoint endpoint_;
};

}  // namespace specforge
