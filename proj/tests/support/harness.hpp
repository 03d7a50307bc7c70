#pragma once
// Bundles a mock backend with the services a DraftingContext borrows.

#include <memory>
#include <string>
#include <vector>

#include "drafting_context.hpp"
#include "llm_gateway.hpp"
#include "prompts.hpp"
#include "retrieval.hpp"
#include "warnings.hpp"

namespace sftest {

struct Harness {
  std::shared_ptr<specforge::MockBackend> backend;
  specforge::Gateway gateway;
  specforge::PromptLibrary prompts = specforge::PromptLibrary::builtin();
  specforge::WarningLog warnings;
  std::unique_ptr<specforge::Retriever> retriever;
  specforge::DraftingContext ctx;

  explicit Harness(std::shared_ptr<specforge::MockBackend> b = std::make_shared<specforge::MockBackend>())
      : backend(b),
        gateway(b, specforge::GatewayOptions{3, std::chrono::milliseconds(0), 1.0, 4}),
        ctx{gateway, prompts, warnings, nullptr, 0.0} {}

  void use_retriever(std::shared_ptr<specforge::SearchProvider> provider) {
    retriever = std::make_unique<specforge::Retriever>(provider, specforge::RetrieverOptions{});
    ctx.retriever = retriever.get();
  }

  std::vector<std::string> tags() const { return gateway.log().tags(); }

  size_t count_family(const std::string& family) const {
    size_t n = 0;
    for (const auto& t : tags()) {
      if (t.substr(0, t.find(':')) == family) ++n;
    }
    return n;
  }

  bool warned(const std::string& needle) const {
    for (const auto& w : warnings.entries()) {
      if (w.find(needle) != std::string::npos) return true;
    }
    return false;
  }
};

}  // namespace sftest
