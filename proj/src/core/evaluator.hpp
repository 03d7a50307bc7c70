#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "domain.hpp"
#include "llm_gateway.hpp"

namespace specforge {

struct ProfanityLexicon {
  // Lowercase words or multi-word phrases, matched on canonical tokens.
  std::vector<std::string> phrases = {"crucial", "critical", "prior art", "necessary aspect", "necessary component"};
  // Count "claim <integer>" references.
  bool claim_reference_rule = true;
  // Also count "claims <integer>".
  bool accept_plural_claims = true;

  // One phrase per line; blank lines and lines starting with '#' are skipped.
  static ProfanityLexicon from_file(const std::filesystem::path& path);
};

inline constexpr int kMaxNgram = 10;

// Sum over n = 1..10 of (distinct n-grams / n-grams); lengths shorter than n add 0.
double ngram_diversity(const TokenStream& tokens);
double diversity_difference(const TokenStream& generated, const TokenStream& reference);

// Non-overlapping left-to-right matches; at each position the longest
// lexicon phrase wins, then the claim-reference rule.
std::uint64_t profanity_count(std::string_view text, const ProfanityLexicon& lexicon);

// Consecutive chunks of chunk_tokens canonical tokens, re-joined by spaces.
std::vector<std::string> chunk_text(const TokenStream& tokens, size_t chunk_tokens);
// Element-wise mean. Throws InvalidInput on an empty list or mixed lengths.
std::vector<double> mean_pool(std::span<const EmbeddingVector> vectors);
// Throws ZeroVector when either side has zero norm.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

inline constexpr size_t kMaxChunkTokens = 512;

// Chunk, embed, mean-pool each document, then cosine of the pooled vectors.
double embedding_similarity(std::string_view generated, std::string_view reference, Gateway& gateway,
                            size_t chunk_tokens);

struct EvaluatorConfig {
  size_t chunk_tokens = 400;
  ProfanityLexicon lexicon;
};

struct EvaluationReport {
  std::string source_id;
  // Absent when the embedding backend failed; the reason is kept alongside.
  std::optional<double> similarity;
  std::string similarity_error;
  std::uint64_t profanity_count = 0;
  double ngd_generated = 0.0;
  double ngd_reference = 0.0;
  double diversity_difference = 0.0;
};

// All metrics over the rendered documents. A null gateway, or any embedding
// failure, leaves similarity unavailable without failing the report.
EvaluationReport evaluate(const Specification& generated, const Specification& reference, const EvaluatorConfig& cfg,
                          Gateway* gateway);

struct MetricSummary {
  size_t n = 0;
  double mean = 0.0;
  // Sample standard deviation (n - 1); 0 for a single value.
  double sd = 0.0;
};

MetricSummary summarize(std::span<const double> values);

struct AggregateReport {
  size_t pairs = 0;
  MetricSummary similarity;
  MetricSummary profanity;
  MetricSummary ngd_generated;
  MetricSummary ngd_reference;
  MetricSummary diversity_difference;
};

AggregateReport aggregate_reports(std::span<const EvaluationReport> reports);

}  // namespace specforge
