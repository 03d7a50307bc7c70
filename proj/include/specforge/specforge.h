/* specforge: patent specification drafting and evaluation, C interface.
 *
 * Objects are opaque handles created and destroyed through this API.
 * Every fallible call returns an sf_status; on failure a message for the
 * calling thread is available from sf_last_error() until the next call.
 * Strings returned through char** out-parameters are owned by the caller
 * and released with sf_string_free(). Strings returned directly (const char*)
 * live as long as the handle they came from.
 */
#ifndef SPECFORGE_SPECFORGE_H
#define SPECFORGE_SPECFORGE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SF_API __declspec(dllexport)
#else
#define SF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sf_status {
  SF_OK = 0,
  SF_ERR_INVALID_INPUT = 1,
  SF_ERR_BACKEND_UNAVAILABLE = 2,
  SF_ERR_RESPONSE_EMPTY = 3,
  SF_ERR_DIMENSION_MISMATCH = 4,
  SF_ERR_PRIVACY_VIOLATION = 5,
  SF_ERR_NO_RESULTS = 6,
  SF_ERR_PARSE_FAILURE = 7,
  SF_ERR_DRAFT_FAILURE = 8,
  SF_ERR_MISSING_SECTION = 9,
  SF_ERR_ZERO_VECTOR = 10,
  SF_ERR_EMPTY_GROUP = 11,
  SF_ERR_NO_OVERLAP = 12,
  SF_ERR_DEGENERATE_INPUT = 13,
  SF_ERR_IO = 14,
  SF_ERR_INTERNAL = 99
} sf_status;

typedef enum sf_kappa_weighting { SF_KAPPA_LINEAR = 0, SF_KAPPA_QUADRATIC = 1 } sf_kappa_weighting;

typedef struct sf_context sf_context;
typedef struct sf_result sf_result;

SF_API const char* sf_version(void);
/* Stable name such as "PrivacyViolation"; "Ok" for SF_OK. */
SF_API const char* sf_status_name(sf_status status);
/* Message of the last failed call on this thread; "" if none. */
SF_API const char* sf_last_error(void);
SF_API void sf_string_free(char* s);

/* ---- context ----------------------------------------------------------- */

/* config_json may be NULL or "" for defaults (mock backend, no search).
 * API keys are taken from SPECFORGE_API_KEY and SPECFORGE_SEARCH_KEY. */
SF_API sf_status sf_context_create(const char* config_json, sf_context** out);
SF_API void sf_context_destroy(sf_context* ctx);
/* Effective configuration without secrets. */
SF_API sf_status sf_context_config(const sf_context* ctx, char** out_json);

/* ---- drafting ---------------------------------------------------------- */

/* Splits a JSON document or array of documents into a JSON array, validating
 * each entry. */
SF_API sf_status sf_parse_documents(const char* json, char** out_array_json);

/* Drafts one document (a JSON object). mode may be NULL to use the
 * configured mode. A drafting failure still yields a result handle whose
 * status reports it, so the run artifacts can be written; the return value
 * is non-OK only when no result could be produced at all. Thread-safe. */
SF_API sf_status sf_draft(const sf_context* ctx, const char* document_json, const char* mode, sf_result** out);
SF_API sf_status sf_result_status(const sf_result* result);
SF_API const char* sf_result_error(const sf_result* result);
SF_API const char* sf_result_source_id(const sf_result* result);
/* Rendered specification; "" when drafting failed. */
SF_API const char* sf_result_text(const sf_result* result);
SF_API size_t sf_result_artifact_count(const sf_result* result);
/* File name and content of the i-th run artifact. */
SF_API const char* sf_result_artifact_name(const sf_result* result, size_t index);
SF_API const char* sf_result_artifact_content(const sf_result* result, size_t index);
SF_API void sf_result_destroy(sf_result* result);

/* Renders the gold specification of a document JSON object. */
SF_API sf_status sf_render_gold(const char* document_json, char** out_text);
/* Parses rendered text and renders it again; fails on malformed text. */
SF_API sf_status sf_normalize_rendered(const char* text, char** out_text);

/* ---- evaluation -------------------------------------------------------- */

/* Both inputs are rendered specifications. The report is a JSON object; its
 * similarity is null (with similarity_error) when embeddings failed. */
SF_API sf_status sf_evaluate(const sf_context* ctx, const char* source_id, const char* generated_text,
                             const char* reference_text, char** out_report_json);
/* Mean and sample sd over a JSON array of reports. */
SF_API sf_status sf_aggregate(const char* reports_json, char** out_json);

/* ---- annotation statistics --------------------------------------------- */

/* Loads annotation files (.csv or JSON lines) and reports the score table,
 * pairwise win/loss/tie rates and inter-annotator agreement as JSON.
 * Settings come from the context's "stats" config. */
SF_API sf_status sf_stats(const sf_context* ctx, const char* const* paths, size_t n_paths, char** out_json);

/* ---- metrics ----------------------------------------------------------- */

SF_API sf_status sf_ngram_diversity(const char* text, double* out);
/* lexicon_json: NULL for the default lexicon, or
 * {"phrases":[...], "claim_reference_rule":bool, "accept_plural_claims":bool}. */
SF_API sf_status sf_profanity_count(const char* text, const char* lexicon_json, uint64_t* out);
SF_API sf_status sf_kendall_tau(const double* x, const double* y, size_t n, double* out_tau, double* out_p_value);
SF_API sf_status sf_weighted_kappa(const int* x, const int* y, size_t n, sf_kappa_weighting weighting, double* out);

#ifdef __cplusplus
}
#endif

#endif
