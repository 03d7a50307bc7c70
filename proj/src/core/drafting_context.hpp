#pragma once

#include "llm_gateway.hpp"
#include "prompts.hpp"
#include "retrieval.hpp"
#include "warnings.hpp"

namespace specforge {

// Services shared by the orchestrator, generator and merger for one document.
struct DraftingContext {
  Gateway& gateway;
  const PromptLibrary& prompts;
  WarningLog& warnings;
  // Null when retrieval is disabled.
  Retriever* retriever = nullptr;
  double temperature = 0.0;

  std::string chat(const std::string& tag, const std::string& user_prompt, int max_output_tokens) const {
    ChatRequest req;
    req.system_prompt = prompts.render("system", {});
    req.user_prompt = user_prompt;
    req.max_output_tokens = max_output_tokens;
    req.temperature = temperature;
    req.tag = tag;
    return gateway.chat(req);
  }
};

}  // namespace specforge
