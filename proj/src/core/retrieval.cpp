#include "retrieval.hpp"

#include <algorithm>
#include <set>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "errors.hpp"
#include "http_transport.hpp"
#include "llm_gateway.hpp"

namespace specforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string join_window(const TokenStream& tokens, size_t start, size_t n) {
  std::string key;
  for (size_t i = start; i < start + n; ++i) {
    if (i > start) key.push_back('\x1f');
    key += tokens[i];
  }
  return key;
}

std::vector<std::string> vocabulary(std::string_view text) {
  TokenStream tokens = tokenize(text);
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  return tokens;
}

std::string clip(std::string_view text, size_t max_chars) {
  std::string t = trim(text);
  if (t.size() <= max_chars) return t;
  size_t cut = t.rfind(' ', max_chars);
  if (cut == std::string::npos || cut == 0) cut = max_chars;
  return t.substr(0, cut);
}

}  // namespace

std::string SearchQuery::text() const {
  const std::string c = trim(concept_text);
  const std::string q = trim(qualifier);
  if (q.empty()) return c;
  if (c.empty()) return q;
  return c + " " + q;
}

SearchQuery guard_query(const SearchQuery& query, const ClaimSet& claims) {
  const TokenStream q = tokenize(query.text());
  if (q.size() < kPrivacyNgram) return query;

  std::unordered_set<std::string> windows;
  for (const auto& claim : claims.claims()) {
    const TokenStream c = tokenize(claim.text);
    for (size_t i = 0; i + kPrivacyNgram <= c.size(); ++i) windows.insert(join_window(c, i, kPrivacyNgram));
  }
  for (size_t i = 0; i + kPrivacyNgram <= q.size(); ++i) {
    if (windows.count(join_window(q, i, kPrivacyNgram))) {
      fail(ErrorCode::PrivacyViolation,
           "search query shares an " + std::to_string(kPrivacyNgram) + "-token window with the claims");
    }
  }
  return query;
}

// ---------------------------------------------------------------------------

LocalCorpusProvider::LocalCorpusProvider(const fs::path& dir, size_t max_snippet_chars)
    : max_snippet_chars_(max_snippet_chars) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) fail(ErrorCode::Io, "local corpus directory not found: " + dir.string());
  std::vector<Document> docs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot read corpus document " + entry.path().string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    docs.push_back(Document{entry.path().filename().string(), std::move(text)});
  }
  *this = LocalCorpusProvider(std::move(docs), max_snippet_chars);
}

LocalCorpusProvider::LocalCorpusProvider(std::vector<Document> docs, size_t max_snippet_chars)
    : max_snippet_chars_(max_snippet_chars) {
  std::sort(docs.begin(), docs.end(), [](const Document& a, const Document& b) { return a.id < b.id; });
  for (auto& d : docs) {
    if (trim(d.text).empty()) continue;
    auto vocab = vocabulary(d.text);
    docs_.push_back(Indexed{std::move(d), std::move(vocab)});
  }
}

RetrievedDoc LocalCorpusProvider::search(const SearchQuery& query) {
  const auto terms = vocabulary(query.text());
  const Indexed* best = nullptr;
  size_t best_score = 0;
  for (const auto& d : docs_) {
    size_t score = 0;
    for (const auto& t : terms) {
      if (std::binary_search(d.vocabulary.begin(), d.vocabulary.end(), t)) ++score;
    }
    // Strict comparison keeps the earliest id on ties.
    if (score > best_score) {
      best_score = score;
      best = &d;
    }
  }
  if (best == nullptr) fail(ErrorCode::NoResults, "no local document matches '" + query.text() + "'");
  return RetrievedDoc{best->doc.id, clip(best->doc.text, max_snippet_chars_), iso_timestamp_now()};
}

// ---------------------------------------------------------------------------

WebSearchProvider::WebSearchProvider(std::string endpoint, std::string api_key, std::chrono::seconds timeout)
    : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)), timeout_(timeout) {
  if (endpoint_.empty()) fail(ErrorCode::InvalidInput, "web search provider needs an endpoint");
}

RetrievedDoc WebSearchProvider::search(const SearchQuery& query) {
  HttpHeaders headers;
  if (!api_key_.empty()) headers.emplace_back("Authorization", "Bearer " + api_key_);
  const json body = {{"query", query.text()}, {"count", 1}};
  HttpResponse res;
  try {
    res = http_post_json(endpoint_, headers, body.dump(), timeout_);
  } catch (const TransportError& e) {
    fail(ErrorCode::BackendUnavailable, e.what());
  }
  if (res.status != 200) fail(ErrorCode::BackendUnavailable, "search endpoint returned HTTP " + std::to_string(res.status));

  json reply;
  try {
    reply = json::parse(res.body);
  } catch (const json::exception& e) {
    fail(ErrorCode::BackendUnavailable, std::string("malformed search response: ") + e.what());
  }
  if (!reply.contains("results") || !reply["results"].is_array()) {
    fail(ErrorCode::BackendUnavailable, "search response lacks a results array");
  }
  for (const auto& r : reply["results"]) {
    std::string snippet;
    for (const char* key : {"snippet", "content", "text"}) {
      if (r.contains(key) && r[key].is_string()) {
        snippet = r[key].get<std::string>();
        break;
      }
    }
    if (trim(snippet).empty()) continue;
    return RetrievedDoc{r.value("url", std::string()), trim(snippet), iso_timestamp_now()};
  }
  fail(ErrorCode::NoResults, "search returned nothing for '" + query.text() + "'");
}

// ---------------------------------------------------------------------------

Retriever::Retriever(std::shared_ptr<SearchProvider> provider, RetrieverOptions options)
    : provider_(std::move(provider)), options_(std::move(options)) {
  if (!options_.query_log_path.empty()) {
    if (options_.query_log_path.has_parent_path()) fs::create_directories(options_.query_log_path.parent_path());
    log_file_.open(options_.query_log_path, std::ios::app);
    if (!log_file_) fail(ErrorCode::Io, "cannot open query log " + options_.query_log_path.string());
  }
}

void Retriever::record(QueryLogEntry entry) {
  std::lock_guard lock(mu_);
  if (log_file_.is_open()) {
    const json line = {{"source_id", entry.source_id}, {"item_id", entry.item_id}, {"query", entry.query},
                       {"outcome", entry.outcome},     {"sent", entry.sent},       {"timestamp", entry.timestamp}};
    log_file_ << line.dump() << '\n';
    log_file_.flush();
  }
  log_.push_back(std::move(entry));
}

void Retriever::throttle() {
  if (options_.min_interval.count() <= 0) return;
  std::lock_guard lock(rate_mu_);
  const auto now = std::chrono::steady_clock::now();
  const auto ready = last_query_ + options_.min_interval;
  if (now < ready) std::this_thread::sleep_for(ready - now);
  last_query_ = std::chrono::steady_clock::now();
}

RetrievedDoc Retriever::retrieve(const SearchQuery& query, const ClaimSet& claims, const std::string& item_id) {
  QueryLogEntry entry{claims.source_id(), item_id, query.text(), "ok", false, iso_timestamp_now()};
  if (!provider_) {
    entry.outcome = "NoResults";
    record(entry);
    fail(ErrorCode::NoResults, "no search provider configured");
  }
  try {
    guard_query(query, claims);
  } catch (const Error& e) {
    entry.outcome = std::string(error_code_name(e.code()));
    record(entry);
    throw;
  }
  throttle();
  entry.sent = true;
  try {
    RetrievedDoc doc = provider_->search(query);
    record(entry);
    return doc;
  } catch (const Error& e) {
    entry.outcome = std::string(error_code_name(e.code()));
    record(entry);
    throw;
  }
}

std::vector<QueryLogEntry> Retriever::query_log() const {
  std::lock_guard lock(mu_);
  return log_;
}

std::vector<QueryLogEntry> Retriever::query_log(const std::string& source_id) const {
  std::lock_guard lock(mu_);
  std::vector<QueryLogEntry> out;
  for (const auto& e : log_) {
    if (e.source_id == source_id) out.push_back(e);
  }
  return out;
}

}  // namespace specforge
