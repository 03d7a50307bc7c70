#include "engine.hpp"

#include <cstdlib>
#include <set>

namespace specforge {

namespace fs = std::filesystem;

namespace {

// Reads typed fields from one JSON object and rejects keys nobody asked for.
class Fields {
 public:
  Fields(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) fail(ErrorCode::InvalidInput, where_ + " must be a JSON object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key) || j_[key].is_null()) return;
    try {
      out = j_[key].get<T>();
    } catch (const Json::exception&) {
      fail(ErrorCode::InvalidInput, where_ + "." + key + " has the wrong type");
    }
  }

  const Json* object(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key) || j_[key].is_null()) return nullptr;
    return &j_[key];
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (key == "api_key") {
        fail(ErrorCode::InvalidInput, where_ + ".api_key is not accepted; set SPECFORGE_API_KEY or SPECFORGE_SEARCH_KEY");
      }
      if (!seen_.count(key)) fail(ErrorCode::InvalidInput, "unknown config key " + where_ + "." + key);
    }
  }

 private:
  const Json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void read_backend(const Json& j, BackendSettings& b) {
  Fields f(j, "backend");
  f.read("type", b.type);
  f.read("base_url", b.openai.base_url);
  f.read("model", b.openai.model);
  f.read("embedding_model", b.openai.embedding_model);
  size_t dim = 0;
  f.read("embedding_dimension", dim);
  if (dim > 0) {
    b.openai.embedding_dimension = dim;
    b.mock_embedding_dimension = dim;
  }
  int timeout = static_cast<int>(b.openai.timeout.count());
  f.read("timeout_s", timeout);
  b.openai.timeout = std::chrono::seconds(timeout);
  if (const Json* script = f.object("script")) {
    if (!script->is_object()) fail(ErrorCode::InvalidInput, "backend.script must map tags to replies");
    for (const auto& [tag, replies] : script->items()) {
      if (replies.is_string()) {
        b.mock_script[tag] = {replies.get<std::string>()};
      } else if (replies.is_array() && !replies.empty() &&
                 std::all_of(replies.begin(), replies.end(), [](const Json& r) { return r.is_string(); })) {
        b.mock_script[tag] = replies.get<std::vector<std::string>>();
      } else {
        fail(ErrorCode::InvalidInput, "backend.script." + tag + " must be a string or a non-empty list of strings");
      }
    }
  }
  f.read("unavailable", b.mock_unavailable);
  f.read("auto_reply", b.mock_auto_reply);
  f.finish();
}

void read_gateway(const Json& j, GatewayOptions& g) {
  Fields f(j, "gateway");
  f.read("max_retries", g.max_retries);
  long long backoff = g.backoff.count();
  f.read("backoff_ms", backoff);
  g.backoff = std::chrono::milliseconds(backoff);
  f.read("backoff_multiplier", g.backoff_multiplier);
  f.read("max_concurrency", g.max_concurrency);
  f.finish();
}

void read_search(const Json& j, SearchSettings& s) {
  Fields f(j, "search");
  f.read("type", s.type);
  f.read("endpoint", s.endpoint);
  std::string corpus = s.local_corpus.string();
  f.read("local_corpus", corpus);
  s.local_corpus = corpus;
  long long interval = s.min_interval.count();
  f.read("min_interval_ms", interval);
  s.min_interval = std::chrono::milliseconds(interval);
  int timeout = static_cast<int>(s.timeout.count());
  f.read("timeout_s", timeout);
  s.timeout = std::chrono::seconds(timeout);
  f.finish();
}

void read_orchestrator(const Json& j, OrchestratorConfig& o) {
  Fields f(j, "orchestrator");
  f.read("max_technical_items", o.max_technical_items);
  f.read("multipass_threshold_tokens", o.multipass_threshold_tokens);
  std::vector<std::string> plan;
  f.read("template_plan", plan);
  if (!plan.empty()) {
    o.template_plan.clear();
    for (const auto& key : plan) {
      const auto name = parse_section_key(key);
      if (!name) fail(ErrorCode::InvalidInput, "orchestrator.template_plan: unknown section '" + key + "'");
      o.template_plan.push_back(*name);
    }
  }
  f.read("template_only", o.template_only);
  f.read("max_brief_tokens", o.max_brief_tokens);
  f.read("extract_max_output_tokens", o.extract_max_output_tokens);
  f.read("contextualize_max_output_tokens", o.contextualize_max_output_tokens);
  f.read("concurrency", o.concurrency);
  f.finish();
}

void read_generator(const Json& j, GeneratorConfig& g) {
  Fields f(j, "generator");
  f.read("abstract_max_tokens", g.abstract_max_tokens);
  f.read("template_max_tokens", g.template_max_tokens);
  f.read("technical_max_tokens", g.technical_max_tokens);
  f.read("concurrency", g.concurrency);
  f.finish();
}

void read_evaluator(const Json& j, RunConfig& cfg) {
  Fields f(j, "evaluator");
  f.read("chunk_tokens", cfg.evaluator.chunk_tokens);
  std::string lexicon = cfg.lexicon_path.string();
  f.read("lexicon", lexicon);
  cfg.lexicon_path = lexicon;
  f.read("claim_reference_rule", cfg.evaluator.lexicon.claim_reference_rule);
  f.read("accept_plural_claims", cfg.evaluator.lexicon.accept_plural_claims);
  f.finish();
}

void read_stats(const Json& j, RunConfig& cfg) {
  Fields f(j, "stats");
  std::string weighting(kappa_weighting_name(cfg.kappa));
  f.read("kappa_weighting", weighting);
  const auto w = parse_kappa_weighting(weighting);
  if (!w) fail(ErrorCode::InvalidInput, "stats.kappa_weighting must be linear or quadratic");
  cfg.kappa = *w;
  std::string unit = cfg.win_unit == WinRateUnit::PerComparison ? "per-comparison" : "source-majority";
  f.read("win_unit", unit);
  if (unit == "per-comparison") cfg.win_unit = WinRateUnit::PerComparison;
  else if (unit == "source-majority") cfg.win_unit = WinRateUnit::SourceMajority;
  else fail(ErrorCode::InvalidInput, "stats.win_unit must be per-comparison or source-majority");
  f.finish();
}

}  // namespace

void RunConfig::validate() const {
  if (trim(label).empty()) fail(ErrorCode::InvalidInput, "run label is blank");
  for (char c : label) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) {
      fail(ErrorCode::InvalidInput, "run label may only contain letters, digits, '-', '_' and '.'");
    }
  }
  if (backend.type != "mock" && backend.type != "openai") {
    fail(ErrorCode::InvalidInput, "backend.type must be mock or openai");
  }
  if (backend.type == "openai" && trim(backend.openai.model).empty()) {
    fail(ErrorCode::InvalidInput, "backend.model is required for the openai backend");
  }
  if (backend.mock_embedding_dimension == 0) fail(ErrorCode::InvalidInput, "embedding dimension must be positive");
  if (search.type != "none" && search.type != "local" && search.type != "web") {
    fail(ErrorCode::InvalidInput, "search.type must be none, local or web");
  }
  if (search.type == "local" && search.local_corpus.empty()) {
    fail(ErrorCode::InvalidInput, "search.local_corpus is required for local search");
  }
  if (search.type == "web" && trim(search.endpoint).empty()) {
    fail(ErrorCode::InvalidInput, "search.endpoint is required for web search");
  }
  if (gateway.max_retries < 0 || gateway.max_concurrency < 1 || gateway.backoff.count() < 0 ||
      gateway.backoff_multiplier < 1.0) {
    fail(ErrorCode::InvalidInput, "gateway settings out of range");
  }
  if (concurrency < 1) fail(ErrorCode::InvalidInput, "concurrency must be at least 1");
  if (evaluator.chunk_tokens == 0 || evaluator.chunk_tokens > kMaxChunkTokens) {
    fail(ErrorCode::InvalidInput, "evaluator.chunk_tokens must be in 1.." + std::to_string(kMaxChunkTokens));
  }
  if (temperature < 0.0 || temperature > 2.0) fail(ErrorCode::InvalidInput, "temperature must be in [0, 2]");
  pipeline.orchestrator.validate();
}

RunConfig run_config_from_json(const Json& j) {
  RunConfig cfg;
  Fields f(j, "config");
  f.read("label", cfg.label);
  std::string mode(mode_name(cfg.mode));
  f.read("mode", mode);
  const auto m = parse_mode(mode);
  if (!m) fail(ErrorCode::InvalidInput, "unknown mode '" + mode + "'");
  cfg.mode = *m;
  f.read("concurrency", cfg.concurrency);
  std::string prompt_dir;
  f.read("prompt_dir", prompt_dir);
  cfg.prompt_dir = prompt_dir;
  f.read("temperature", cfg.temperature);
  if (const Json* b = f.object("backend")) read_backend(*b, cfg.backend);
  if (const Json* g = f.object("gateway")) read_gateway(*g, cfg.gateway);
  if (const Json* s = f.object("search")) read_search(*s, cfg.search);
  if (const Json* o = f.object("orchestrator")) read_orchestrator(*o, cfg.pipeline.orchestrator);
  if (const Json* g = f.object("generator")) read_generator(*g, cfg.pipeline.generator);
  if (const Json* m2 = f.object("merger")) {
    Fields mf(*m2, "merger");
    mf.read("splice_max_tokens", cfg.pipeline.merger.splice_max_tokens);
    mf.finish();
  }
  if (const Json* b = f.object("baseline")) {
    Fields bf(*b, "baseline");
    bf.read("single_gen_max_tokens", cfg.pipeline.baseline.single_gen_max_tokens);
    bf.read("multi_gen_max_tokens", cfg.pipeline.baseline.multi_gen_max_tokens);
    bf.read("claim_iterative_max_tokens", cfg.pipeline.baseline.claim_iterative_max_tokens);
    bf.finish();
  }
  if (const Json* e = f.object("evaluator")) read_evaluator(*e, cfg);
  if (const Json* s = f.object("stats")) read_stats(*s, cfg);
  f.finish();
  return cfg;
}

void apply_environment(RunConfig& cfg) {
  if (const char* key = std::getenv("SPECFORGE_API_KEY"); key && *key) cfg.backend.openai.api_key = key;
  if (const char* key = std::getenv("SPECFORGE_SEARCH_KEY"); key && *key) cfg.search.api_key = key;
}

Json run_config_to_json(const RunConfig& cfg) {
  Json plan = Json::array();
  for (auto s : cfg.pipeline.orchestrator.template_plan) plan.push_back(section_key(s));
  const auto& o = cfg.pipeline.orchestrator;
  const auto& g = cfg.pipeline.generator;
  const auto& b = cfg.pipeline.baseline;
  return {
      {"label", cfg.label},
      {"mode", mode_name(cfg.mode)},
      {"concurrency", cfg.concurrency},
      {"prompt_dir", cfg.prompt_dir.string()},
      {"temperature", cfg.temperature},
      {"backend",
       {{"type", cfg.backend.type},
        {"base_url", cfg.backend.openai.base_url},
        {"model", cfg.backend.openai.model},
        {"embedding_model", cfg.backend.openai.embedding_model},
        {"embedding_dimension", cfg.backend.type == "mock" ? cfg.backend.mock_embedding_dimension
                                                           : cfg.backend.openai.embedding_dimension}}},
      {"gateway",
       {{"max_retries", cfg.gateway.max_retries},
        {"backoff_ms", cfg.gateway.backoff.count()},
        {"backoff_multiplier", cfg.gateway.backoff_multiplier},
        {"max_concurrency", cfg.gateway.max_concurrency}}},
      {"search",
       {{"type", cfg.search.type},
        {"endpoint", cfg.search.endpoint},
        {"local_corpus", cfg.search.local_corpus.string()},
        {"min_interval_ms", cfg.search.min_interval.count()}}},
      {"orchestrator",
       {{"max_technical_items", o.max_technical_items},
        {"multipass_threshold_tokens", o.multipass_threshold_tokens},
        {"template_plan", plan},
        {"template_only", o.template_only},
        {"max_brief_tokens", o.max_brief_tokens},
        {"concurrency", o.concurrency}}},
      {"generator",
       {{"abstract_max_tokens", g.abstract_max_tokens},
        {"template_max_tokens", g.template_max_tokens},
        {"technical_max_tokens", g.technical_max_tokens},
        {"concurrency", g.concurrency}}},
      {"merger", {{"splice_max_tokens", cfg.pipeline.merger.splice_max_tokens}}},
      {"baseline",
       {{"single_gen_max_tokens", b.single_gen_max_tokens},
        {"multi_gen_max_tokens", b.multi_gen_max_tokens},
        {"claim_iterative_max_tokens", b.claim_iterative_max_tokens}}},
      {"evaluator",
       {{"chunk_tokens", cfg.evaluator.chunk_tokens},
        {"lexicon", cfg.lexicon_path.string()},
        {"claim_reference_rule", cfg.evaluator.lexicon.claim_reference_rule},
        {"accept_plural_claims", cfg.evaluator.lexicon.accept_plural_claims}}},
      {"stats",
       {{"kappa_weighting", kappa_weighting_name(cfg.kappa)},
        {"win_unit", cfg.win_unit == WinRateUnit::PerComparison ? "per-comparison" : "source-majority"}}},
  };
}

// ---------------------------------------------------------------------------

Engine::Engine(RunConfig cfg) : cfg_(std::move(cfg)), prompts_(PromptLibrary::builtin()) {
  cfg_.validate();
  if (!cfg_.lexicon_path.empty()) {
    ProfanityLexicon lex = ProfanityLexicon::from_file(cfg_.lexicon_path);
    lex.claim_reference_rule = cfg_.evaluator.lexicon.claim_reference_rule;
    lex.accept_plural_claims = cfg_.evaluator.lexicon.accept_plural_claims;
    cfg_.evaluator.lexicon = std::move(lex);
  }
  if (!cfg_.prompt_dir.empty()) prompts_ = PromptLibrary::with_overrides(cfg_.prompt_dir);

  if (cfg_.backend.type == "openai") {
    backend_ = std::make_shared<OpenAIBackend>(cfg_.backend.openai);
  } else {
    auto mock = std::make_shared<MockBackend>(cfg_.backend.mock_embedding_dimension);
    for (const auto& [tag, replies] : cfg_.backend.mock_script) mock->script(tag, replies);
    mock->set_unavailable(cfg_.backend.mock_unavailable);
    mock->set_auto_reply(cfg_.backend.mock_auto_reply);
    backend_ = std::move(mock);
  }
  limiter_ = std::make_shared<ConcurrencyLimiter>(cfg_.gateway.max_concurrency);

  std::shared_ptr<SearchProvider> provider;
  if (cfg_.search.type == "local") {
    provider = std::make_shared<LocalCorpusProvider>(cfg_.search.local_corpus);
  } else if (cfg_.search.type == "web") {
    provider = std::make_shared<WebSearchProvider>(cfg_.search.endpoint, cfg_.search.api_key, cfg_.search.timeout);
  }
  if (provider) {
    RetrieverOptions options;
    options.min_interval = cfg_.search.min_interval;
    retriever_ = std::make_unique<Retriever>(std::move(provider), options);
  }
}

DocumentRun Engine::draft(const PatentDocument& doc, std::optional<ModeId> mode) const {
  DocumentRun run;
  run.source_id = doc.source_id();
  run.mode = mode.value_or(cfg_.mode);
  Gateway gateway(backend_, cfg_.gateway, limiter_);
  WarningLog warnings;
  DraftingContext ctx{gateway, prompts_, warnings, retriever_.get(), cfg_.temperature};
  try {
    run.outcome = specforge::draft(run.mode, doc, cfg_.pipeline, ctx);
  } catch (const Error& e) {
    run.error_code = e.code();
    run.error = e.what();
  } catch (const std::exception& e) {
    run.error_code = ErrorCode::DraftFailure;
    run.error = e.what();
  }
  run.calls = gateway.log().entries();
  if (retriever_) run.queries = retriever_->query_log(doc.source_id());
  run.warnings = warnings.entries();
  return run;
}

EvaluationReport Engine::evaluate(const Specification& generated, const Specification& reference) const {
  Gateway gateway(backend_, cfg_.gateway, limiter_);
  return specforge::evaluate(generated, reference, cfg_.evaluator, &gateway);
}

std::vector<std::pair<std::string, std::string>> run_artifacts(const DocumentRun& run, const PromptLibrary& prompts) {
  std::vector<std::pair<std::string, std::string>> files;
  const PipelineTrace empty;
  const PipelineTrace& trace = run.outcome ? run.outcome->trace : empty;

  Json status = {{"source_id", run.source_id}, {"mode", mode_name(run.mode)}, {"ok", run.ok()}};
  status["error_code"] = run.error_code ? Json(error_code_name(*run.error_code)) : Json();
  status["error"] = run.error.empty() ? Json() : Json(run.error);
  if (run.outcome) status["paragraphs"] = run.outcome->spec.paragraph_count();
  Json versions = Json::object();
  for (const auto& [name, v] : prompts.versions()) versions[name] = v;
  status["prompt_versions"] = std::move(versions);
  files.emplace_back("status.json", status.dump(2) + "\n");

  files.emplace_back("outline.json", (trace.outline ? outline_to_json(*trace.outline) : Json()).dump(2) + "\n");
  files.emplace_back("drafts.json", drafts_to_json(trace.drafts, trace.skipped_items).dump(2) + "\n");
  files.emplace_back("decisions.json", decisions_to_json(trace.decisions).dump(2) + "\n");
  files.emplace_back("warnings.json", Json(run.warnings).dump(2) + "\n");
  files.emplace_back("queries.jsonl", to_jsonl(std::span<const QueryLogEntry>(run.queries), query_entry_to_json));
  files.emplace_back("calllog.jsonl", to_jsonl(std::span<const CallLogEntry>(run.calls), call_entry_to_json));
  return files;
}

}  // namespace specforge
