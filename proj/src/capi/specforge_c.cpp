#include "specforge/specforge.h"

#include <cstdlib>
#include <cstring>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "annotation_stats.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "evaluator.hpp"
#include "serialization.hpp"

using namespace specforge;

struct sf_context {
  Engine engine;
};

struct sf_result {
  sf_status status = SF_OK;
  std::string error;
  std::string source_id;
  std::string text;
  std::vector<std::pair<std::string, std::string>> artifacts;
};

namespace {

thread_local std::string last_error;

sf_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return SF_ERR_INVALID_INPUT;
    case ErrorCode::BackendUnavailable: return SF_ERR_BACKEND_UNAVAILABLE;
    case ErrorCode::ResponseEmpty: return SF_ERR_RESPONSE_EMPTY;
    case ErrorCode::DimensionMismatch: return SF_ERR_DIMENSION_MISMATCH;
    case ErrorCode::PrivacyViolation: return SF_ERR_PRIVACY_VIOLATION;
    case ErrorCode::NoResults: return SF_ERR_NO_RESULTS;
    case ErrorCode::ParseFailure: return SF_ERR_PARSE_FAILURE;
    case ErrorCode::DraftFailure: return SF_ERR_DRAFT_FAILURE;
    case ErrorCode::MissingSection: return SF_ERR_MISSING_SECTION;
    case ErrorCode::ZeroVector: return SF_ERR_ZERO_VECTOR;
    case ErrorCode::EmptyGroup: return SF_ERR_EMPTY_GROUP;
    case ErrorCode::NoOverlap: return SF_ERR_NO_OVERLAP;
    case ErrorCode::DegenerateInput: return SF_ERR_DEGENERATE_INPUT;
    case ErrorCode::Io: return SF_ERR_IO;
  }
  return SF_ERR_INTERNAL;
}

// Runs fn, translating exceptions into a status and the thread's last error.
template <typename Fn>
sf_status guarded(Fn&& fn) {
  last_error.clear();
  try {
    fn();
    return SF_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const Json::exception& e) {
    last_error = std::string("InvalidInput: malformed JSON: ") + e.what();
    return SF_ERR_INVALID_INPUT;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SF_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SF_ERR_INTERNAL;
  }
}

void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorCode::InvalidInput, message);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

Json parse_json(const char* text) {
  require(text != nullptr, "JSON input is null");
  return Json::parse(text);
}

ProfanityLexicon lexicon_from_json(const Json& j) {
  ProfanityLexicon lex;
  require(j.is_object(), "lexicon must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    require(key == "phrases" || key == "claim_reference_rule" || key == "accept_plural_claims",
            "unknown lexicon key '" + key + "'");
  }
  if (j.contains("phrases")) lex.phrases = j["phrases"].get<std::vector<std::string>>();
  for (auto& p : lex.phrases) p = to_lower(trim(p));
  lex.claim_reference_rule = j.value("claim_reference_rule", lex.claim_reference_rule);
  lex.accept_plural_claims = j.value("accept_plural_claims", lex.accept_plural_claims);
  return lex;
}

}  // namespace

extern "C" {

const char* sf_version(void) { return "0.1.0"; }

const char* sf_status_name(sf_status status) {
  switch (status) {
    case SF_OK: return "Ok";
    case SF_ERR_INTERNAL: return "Internal";
    default: break;
  }
  const int code = static_cast<int>(status) - 1;
  if (code >= 0 && code <= static_cast<int>(ErrorCode::Io)) {
    return error_code_name(static_cast<ErrorCode>(code)).data();
  }
  return "Unknown";
}

const char* sf_last_error(void) { return last_error.c_str(); }

void sf_string_free(char* s) { std::free(s); }

sf_status sf_context_create(const char* config_json, sf_context** out) {
  return guarded([&] {
    require(out != nullptr, "output handle pointer is null");
    *out = nullptr;
    RunConfig cfg;
    if (config_json != nullptr && *config_json != '\0') cfg = run_config_from_json(Json::parse(config_json));
    apply_environment(cfg);
    *out = new sf_context{Engine(std::move(cfg))};
  });
}

void sf_context_destroy(sf_context* ctx) { delete ctx; }

sf_status sf_context_config(const sf_context* ctx, char** out_json) {
  return guarded([&] {
    require(ctx != nullptr && out_json != nullptr, "null argument");
    *out_json = dup_string(run_config_to_json(ctx->engine.config()).dump(2));
  });
}

sf_status sf_parse_documents(const char* json, char** out_array_json) {
  return guarded([&] {
    require(out_array_json != nullptr, "null argument");
    const auto docs = documents_from_json(parse_json(json));
    Json arr = Json::array();
    for (const auto& d : docs) arr.push_back(document_to_json(d));
    *out_array_json = dup_string(arr.dump());
  });
}

sf_status sf_draft(const sf_context* ctx, const char* document_json, const char* mode, sf_result** out) {
  return guarded([&] {
    require(ctx != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    std::optional<ModeId> mode_id;
    if (mode != nullptr && *mode != '\0') {
      mode_id = parse_mode(mode);
      if (!mode_id) fail(ErrorCode::InvalidInput, std::string("unknown mode '") + mode + "'");
    }
    const PatentDocument doc = document_from_json(parse_json(document_json));
    const DocumentRun run = ctx->engine.draft(doc, mode_id);
    auto result = std::make_unique<sf_result>();
    result->source_id = run.source_id;
    if (run.ok()) {
      result->text = render(run.outcome->spec);
    } else {
      result->status = run.error_code ? to_status(*run.error_code) : SF_ERR_INTERNAL;
      result->error = run.error;
    }
    result->artifacts = run_artifacts(run, ctx->engine.prompts());
    *out = result.release();
  });
}

sf_status sf_result_status(const sf_result* result) { return result ? result->status : SF_ERR_INVALID_INPUT; }
const char* sf_result_error(const sf_result* result) { return result ? result->error.c_str() : ""; }
const char* sf_result_source_id(const sf_result* result) { return result ? result->source_id.c_str() : ""; }
const char* sf_result_text(const sf_result* result) { return result ? result->text.c_str() : ""; }
size_t sf_result_artifact_count(const sf_result* result) { return result ? result->artifacts.size() : 0; }

const char* sf_result_artifact_name(const sf_result* result, size_t index) {
  if (!result || index >= result->artifacts.size()) return nullptr;
  return result->artifacts[index].first.c_str();
}

const char* sf_result_artifact_content(const sf_result* result, size_t index) {
  if (!result || index >= result->artifacts.size()) return nullptr;
  return result->artifacts[index].second.c_str();
}

void sf_result_destroy(sf_result* result) { delete result; }

sf_status sf_render_gold(const char* document_json, char** out_text) {
  return guarded([&] {
    require(out_text != nullptr, "null argument");
    const PatentDocument doc = document_from_json(parse_json(document_json));
    if (!doc.gold_specification) fail(ErrorCode::InvalidInput, "document '" + doc.source_id() + "' has no gold specification");
    *out_text = dup_string(render(*doc.gold_specification));
  });
}

sf_status sf_normalize_rendered(const char* text, char** out_text) {
  return guarded([&] {
    require(text != nullptr && out_text != nullptr, "null argument");
    *out_text = dup_string(render(parse_rendered(text, "input")));
  });
}

sf_status sf_evaluate(const sf_context* ctx, const char* source_id, const char* generated_text,
                      const char* reference_text, char** out_report_json) {
  return guarded([&] {
    require(ctx != nullptr && generated_text != nullptr && reference_text != nullptr && out_report_json != nullptr,
            "null argument");
    const std::string id = source_id ? source_id : "";
    const Specification gen = parse_rendered(generated_text, id);
    const Specification ref = parse_rendered(reference_text, id);
    *out_report_json = dup_string(report_to_json(ctx->engine.evaluate(gen, ref)).dump());
  });
}

sf_status sf_aggregate(const char* reports_json, char** out_json) {
  return guarded([&] {
    require(out_json != nullptr, "null argument");
    const Json j = parse_json(reports_json);
    require(j.is_array(), "reports must be a JSON array");
    std::vector<EvaluationReport> reports;
    for (const auto& r : j) reports.push_back(report_from_json(r));
    *out_json = dup_string(aggregate_to_json(aggregate_reports(reports)).dump());
  });
}

sf_status sf_stats(const sf_context* ctx, const char* const* paths, size_t n_paths, char** out_json) {
  return guarded([&] {
    require(ctx != nullptr && out_json != nullptr, "null argument");
    require(paths != nullptr && n_paths > 0, "no annotation files given");
    std::vector<AnnotationRecord> records;
    for (size_t i = 0; i < n_paths; ++i) {
      require(paths[i] != nullptr, "null annotation path");
      auto part = load_annotations(paths[i]);
      records.insert(records.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    validate_records(records);
    const RunConfig& cfg = ctx->engine.config();

    std::set<std::string> methods;
    std::set<std::string> annotators;
    std::set<std::string> sources;
    for (const auto& r : records) {
      methods.insert(r.method_id);
      annotators.insert(r.annotator_id);
      sources.insert(r.source_id);
    }
    Json out;
    out["records"] = records.size();
    out["annotators"] = annotators.size();
    out["sources"] = sources.size();
    out["methods"] = Json(std::vector<std::string>(methods.begin(), methods.end()));
    out["scores"] = score_table_to_json(aggregate_scores(records));

    auto rates = [&](WinRateUnit unit) {
      Json list = Json::array();
      for (auto a = methods.begin(); a != methods.end(); ++a) {
        for (auto b = methods.begin(); b != methods.end(); ++b) {
          if (a == b) continue;
          try {
            list.push_back(win_loss_tie_to_json(*a, *b, win_loss_tie(records, *a, *b, unit)));
          } catch (const Error& e) {
            if (e.code() != ErrorCode::NoOverlap) throw;
          }
        }
      }
      return list;
    };
    out["win_unit"] = cfg.win_unit == WinRateUnit::PerComparison ? "per-comparison" : "source-majority";
    out["win_rates"] = rates(cfg.win_unit);
    out["win_rates_by_unit"] = {{"per-comparison", rates(WinRateUnit::PerComparison)},
                                {"source-majority", rates(WinRateUnit::SourceMajority)}};

    out["kappa_weighting"] = kappa_weighting_name(cfg.kappa);
    out["agreement"] = agreement_to_json(agreement(records, cfg.kappa));
    out["agreement_by_weighting"] = {{"linear", agreement_to_json(agreement(records, KappaWeighting::Linear))},
                                     {"quadratic", agreement_to_json(agreement(records, KappaWeighting::Quadratic))}};
    *out_json = dup_string(out.dump(2));
  });
}

sf_status sf_ngram_diversity(const char* text, double* out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "null argument");
    *out = ngram_diversity(tokenize(text));
  });
}

sf_status sf_profanity_count(const char* text, const char* lexicon_json, uint64_t* out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "null argument");
    ProfanityLexicon lex;
    if (lexicon_json != nullptr && *lexicon_json != '\0') lex = lexicon_from_json(Json::parse(lexicon_json));
    *out = profanity_count(text, lex);
  });
}

sf_status sf_kendall_tau(const double* x, const double* y, size_t n, double* out_tau, double* out_p_value) {
  return guarded([&] {
    require(x != nullptr && y != nullptr && out_tau != nullptr, "null argument");
    const KendallResult r = kendall_tau(std::span<const double>(x, n), std::span<const double>(y, n));
    *out_tau = r.tau;
    if (out_p_value) *out_p_value = r.p_value;
  });
}

sf_status sf_weighted_kappa(const int* x, const int* y, size_t n, sf_kappa_weighting weighting, double* out) {
  return guarded([&] {
    require(x != nullptr && y != nullptr && out != nullptr, "null argument");
    require(weighting == SF_KAPPA_LINEAR || weighting == SF_KAPPA_QUADRATIC, "unknown kappa weighting");
    *out = weighted_kappa(std::span<const int>(x, n), std::span<const int>(y, n),
                          weighting == SF_KAPPA_LINEAR ? KappaWeighting::Linear : KappaWeighting::Quadratic);
  });
}

}  // extern "C"
