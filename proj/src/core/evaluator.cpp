#include "evaluator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "errors.hpp"

namespace specforge {

namespace {

bool is_integer_token(std::string_view t) {
  return !t.empty() && std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

}  // namespace

ProfanityLexicon ProfanityLexicon::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot read lexicon " + path.string());
  ProfanityLexicon lex;
  lex.phrases.clear();
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    lex.phrases.push_back(to_lower(t));
  }
  return lex;
}

double ngram_diversity(const TokenStream& tokens) {
  const size_t len = tokens.size();
  if (len == 0) return 0.0;

  // Level-n ids are built from (level n-1 id at i, unigram id at i+n-1), so
  // equal ids mean equal n-grams without materializing them.
  std::vector<std::uint32_t> unigram(len);
  std::unordered_map<std::string_view, std::uint32_t> vocab;
  for (size_t i = 0; i < len; ++i) {
    auto [it, inserted] = vocab.try_emplace(tokens[i], static_cast<std::uint32_t>(vocab.size()));
    unigram[i] = it->second;
  }

  double total = static_cast<double>(vocab.size()) / static_cast<double>(len);
  std::vector<std::uint32_t> ids = unigram;
  for (size_t n = 2; n <= static_cast<size_t>(kMaxNgram) && n <= len; ++n) {
    const size_t count = len - n + 1;
    std::unordered_map<std::uint64_t, std::uint32_t> next_ids;
    next_ids.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      const std::uint64_t key = (static_cast<std::uint64_t>(ids[i]) << 32) | unigram[i + n - 1];
      auto [it, inserted] = next_ids.try_emplace(key, static_cast<std::uint32_t>(next_ids.size()));
      ids[i] = it->second;
    }
    ids.resize(count);
    total += static_cast<double>(next_ids.size()) / static_cast<double>(count);
  }
  return total;
}

double diversity_difference(const TokenStream& generated, const TokenStream& reference) {
  return std::fabs(ngram_diversity(generated) - ngram_diversity(reference));
}

std::uint64_t profanity_count(std::string_view text, const ProfanityLexicon& lexicon) {
  const TokenStream tokens = tokenize(text);
  std::vector<TokenStream> phrases;
  for (const auto& p : lexicon.phrases) {
    TokenStream t = tokenize(p);
    if (!t.empty()) phrases.push_back(std::move(t));
  }
  std::sort(phrases.begin(), phrases.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });

  std::uint64_t count = 0;
  size_t i = 0;
  while (i < tokens.size()) {
    size_t matched = 0;
    for (const auto& p : phrases) {
      if (i + p.size() <= tokens.size() && std::equal(p.begin(), p.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
        matched = p.size();
        break;
      }
    }
    if (matched == 0 && lexicon.claim_reference_rule && i + 1 < tokens.size() &&
        (tokens[i] == "claim" || (lexicon.accept_plural_claims && tokens[i] == "claims")) &&
        is_integer_token(tokens[i + 1])) {
      matched = 2;
    }
    if (matched > 0) {
      ++count;
      i += matched;
    } else {
      ++i;
    }
  }
  return count;
}

std::vector<std::string> chunk_text(const TokenStream& tokens, size_t chunk_tokens) {
  if (chunk_tokens == 0) fail(ErrorCode::InvalidInput, "chunk size must be positive");
  std::vector<std::string> chunks;
  for (size_t start = 0; start < tokens.size(); start += chunk_tokens) {
    std::string chunk;
    const size_t end = std::min(tokens.size(), start + chunk_tokens);
    for (size_t i = start; i < end; ++i) {
      if (i > start) chunk += ' ';
      chunk += tokens[i];
    }
    chunks.push_back(std::move(chunk));
  }
  return chunks;
}

std::vector<double> mean_pool(std::span<const EmbeddingVector> vectors) {
  if (vectors.empty()) fail(ErrorCode::InvalidInput, "nothing to pool");
  std::vector<double> pooled(vectors.front().dimension(), 0.0);
  for (const auto& v : vectors) {
    if (v.dimension() != pooled.size()) fail(ErrorCode::InvalidInput, "cannot pool vectors of different lengths");
    for (size_t d = 0; d < pooled.size(); ++d) pooled[d] += v.values[d];
  }
  for (auto& x : pooled) x /= static_cast<double>(vectors.size());
  return pooled;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) fail(ErrorCode::InvalidInput, "cosine needs two vectors of equal, non-zero length");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) fail(ErrorCode::ZeroVector, "pooled embedding has zero norm; similarity undefined");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double embedding_similarity(std::string_view generated, std::string_view reference, Gateway& gateway,
                            size_t chunk_tokens) {
  if (chunk_tokens == 0 || chunk_tokens > kMaxChunkTokens) {
    fail(ErrorCode::InvalidInput, "chunk_tokens must be in 1.." + std::to_string(kMaxChunkTokens));
  }
  auto pooled = [&](std::string_view text, const char* which) {
    const auto chunks = chunk_text(tokenize(text), chunk_tokens);
    if (chunks.empty()) fail(ErrorCode::InvalidInput, std::string(which) + " document has no tokens");
    std::vector<EmbeddingVector> vectors;
    vectors.reserve(chunks.size());
    for (const auto& c : chunks) vectors.push_back(gateway.embed(c));
    return mean_pool(vectors);
  };
  const auto a = pooled(generated, "generated");
  const auto b = pooled(reference, "reference");
  return cosine_similarity(a, b);
}

EvaluationReport evaluate(const Specification& generated, const Specification& reference, const EvaluatorConfig& cfg,
                          Gateway* gateway) {
  const std::string gen_text = render(generated);
  const std::string ref_text = render(reference);
  const TokenStream gen_tokens = tokenize(gen_text);
  const TokenStream ref_tokens = tokenize(ref_text);

  EvaluationReport report;
  report.source_id = generated.source_id();
  report.profanity_count = profanity_count(gen_text, cfg.lexicon);
  report.ngd_generated = ngram_diversity(gen_tokens);
  report.ngd_reference = ngram_diversity(ref_tokens);
  report.diversity_difference = std::fabs(report.ngd_generated - report.ngd_reference);
  if (gateway == nullptr) {
    report.similarity_error = "no embedding backend configured";
    return report;
  }
  try {
    report.similarity = embedding_similarity(gen_text, ref_text, *gateway, cfg.chunk_tokens);
  } catch (const Error& e) {
    report.similarity_error = e.what();
  }
  return report;
}

MetricSummary summarize(std::span<const double> values) {
  MetricSummary s;
  s.n = values.size();
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

AggregateReport aggregate_reports(std::span<const EvaluationReport> reports) {
  std::vector<double> sim, prof, ngd_g, ngd_r, diff;
  for (const auto& r : reports) {
    if (r.similarity) sim.push_back(*r.similarity);
    prof.push_back(static_cast<double>(r.profanity_count));
    ngd_g.push_back(r.ngd_generated);
    ngd_r.push_back(r.ngd_reference);
    diff.push_back(r.diversity_difference);
  }
  AggregateReport agg;
  agg.pairs = reports.size();
  agg.similarity = summarize(sim);
  agg.profanity = summarize(prof);
  agg.ngd_generated = summarize(ngd_g);
  agg.ngd_reference = summarize(ngd_r);
  agg.diversity_difference = summarize(diff);
  return agg;
}

}  // namespace specforge
