#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "domain.hpp"

namespace specforge {

// Outgoing search request. Built from an outline item's title and brief only.
struct SearchQuery {
  std::string concept_text;
  std::string qualifier;

  std::string text() const;
};

struct RetrievedDoc {
  std::string url_or_path;
  std::string snippet;
  std::string fetched_at;
};

// Window length, in canonical tokens, that a query may not share with any claim.
inline constexpr size_t kPrivacyNgram = 8;

// Returns the query unchanged when no 8-token window of it occurs in any
// claim's token stream; throws PrivacyViolation otherwise.
SearchQuery guard_query(const SearchQuery& query, const ClaimSet& claims);

class SearchProvider {
 public:
  virtual ~SearchProvider() = default;
  // Top-ranked document; throws NoResults when there is none.
  virtual RetrievedDoc search(const SearchQuery& query) = 0;
  virtual std::string name() const = 0;
};

// Offline provider over a directory of plain-text files. Documents are ranked
// by the number of distinct query tokens they contain; ties go to the
// lexicographically first document id.
class LocalCorpusProvider : public SearchProvider {
 public:
  struct Document {
    std::string id;
    std::string text;
  };

  explicit LocalCorpusProvider(const std::filesystem::path& dir, size_t max_snippet_chars = 4000);
  explicit LocalCorpusProvider(std::vector<Document> docs, size_t max_snippet_chars = 4000);

  RetrievedDoc search(const SearchQuery& query) override;
  std::string name() const override { return "local-corpus"; }
  size_t size() const noexcept { return docs_.size(); }

 private:
  struct Indexed {
    Document doc;
    std::vector<std::string> vocabulary;  // sorted unique tokens
  };

  std::vector<Indexed> docs_;
  size_t max_snippet_chars_;
};

// Generic JSON search endpoint. Sends {"query": ..., "count": 1} and reads
// {"results": [{"url": ..., "snippet": ...}]}; "content" or "text" are
// accepted in place of "snippet".
class WebSearchProvider : public SearchProvider {
 public:
  WebSearchProvider(std::string endpoint, std::string api_key, std::chrono::seconds timeout = std::chrono::seconds(30));

  RetrievedDoc search(const SearchQuery& query) override;
  std::string name() const override { return endpoint_; }

 private:
  std::string endpoint_;
  std::string api_key_;
  std::chrono::seconds timeout_;
};

struct QueryLogEntry {
  std::string source_id;
  std::string item_id;
  std::string query;
  std::string outcome;  // "ok", "NoResults", "PrivacyViolation", ...
  bool sent = false;
  std::string timestamp;
};

struct RetrieverOptions {
  // Minimum spacing between outgoing queries; zero disables rate limiting.
  std::chrono::milliseconds min_interval{0};
  // Append-only JSON-lines audit file; empty disables file logging.
  std::filesystem::path query_log_path;
};

// Guard + provider + audit log. Every query is logged; only guarded ones
// are ever handed to the provider.
class Retriever {
 public:
  Retriever(std::shared_ptr<SearchProvider> provider, RetrieverOptions options = {});

  RetrievedDoc retrieve(const SearchQuery& query, const ClaimSet& claims, const std::string& item_id);

  std::vector<QueryLogEntry> query_log() const;
  std::vector<QueryLogEntry> query_log(const std::string& source_id) const;

 private:
  void record(QueryLogEntry entry);
  void throttle();

  std::shared_ptr<SearchProvider> provider_;
  RetrieverOptions options_;
  mutable std::mutex mu_;
  std::vector<QueryLogEntry> log_;
  std::ofstream log_file_;
  std::mutex rate_mu_;
  std::chrono::steady_clock::time_point last_query_{};
};

}  // namespace specforge
