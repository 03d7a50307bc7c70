#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "annotation_stats.hpp"
#include "drafting_modes.hpp"
#include "errors.hpp"
#include "evaluator.hpp"
#include "llm_gateway.hpp"
#include "openai_backend.hpp"
#include "prompts.hpp"
#include "retrieval.hpp"
#include "serialization.hpp"

namespace specforge {

struct BackendSettings {
  // "mock" or "openai".
  std::string type = "mock";
  OpenAIEndpoint openai;
  std::map<std::string, std::vector<std::string>> mock_script;
  size_t mock_embedding_dimension = 8;
  bool mock_unavailable = false;
  bool mock_auto_reply = true;
};

struct SearchSettings {
  // "none", "local" or "web".
  std::string type = "none";
  std::string endpoint;
  std::string api_key;
  std::filesystem::path local_corpus;
  std::chrono::milliseconds min_interval{0};
  std::chrono::seconds timeout{30};
};

struct RunConfig {
  // Names the run directory; keeps repeated runs apart.
  std::string label = "run";
  ModeId mode = ModeId::AutoSpecFull;
  BackendSettings backend;
  GatewayOptions gateway;
  SearchSettings search;
  PipelineConfig pipeline;
  EvaluatorConfig evaluator;
  std::filesystem::path lexicon_path;
  KappaWeighting kappa = KappaWeighting::Linear;
  WinRateUnit win_unit = WinRateUnit::PerComparison;
  // Documents drafted at once.
  int concurrency = 1;
  std::filesystem::path prompt_dir;
  double temperature = 0.0;

  void validate() const;
};

// Every field is optional; unknown keys are rejected so typos surface.
// API keys are never read from the file (see apply_environment).
RunConfig run_config_from_json(const Json& j);
// SPECFORGE_API_KEY -> model endpoint key, SPECFORGE_SEARCH_KEY -> search key.
void apply_environment(RunConfig& cfg);
// Secrets omitted.
Json run_config_to_json(const RunConfig& cfg);

struct DocumentRun {
  std::string source_id;
  ModeId mode = ModeId::AutoSpecFull;
  std::optional<DraftOutcome> outcome;
  std::optional<ErrorCode> error_code;
  std::string error;
  std::vector<CallLogEntry> calls;
  std::vector<QueryLogEntry> queries;
  std::vector<std::string> warnings;

  bool ok() const noexcept { return outcome.has_value(); }
};

// Long-lived services for one configuration. draft() and evaluate() are safe
// to call from several threads; each document gets its own gateway and
// warning log while the backend, concurrency limiter and retriever are shared.
class Engine {
 public:
  explicit Engine(RunConfig cfg);

  const RunConfig& config() const noexcept { return cfg_; }
  const PromptLibrary& prompts() const noexcept { return prompts_; }

  // Never throws for per-document failures; they are reported in the result.
  DocumentRun draft(const PatentDocument& doc, std::optional<ModeId> mode = std::nullopt) const;

  EvaluationReport evaluate(const Specification& generated, const Specification& reference) const;

 private:
  RunConfig cfg_;
  std::shared_ptr<Backend> backend_;
  std::shared_ptr<ConcurrencyLimiter> limiter_;
  PromptLibrary prompts_;
  std::unique_ptr<Retriever> retriever_;
};

// Files of a document's run directory, name -> content.
std::vector<std::pair<std::string, std::string>> run_artifacts(const DocumentRun& run, const PromptLibrary& prompts);

}  // namespace specforge
