#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace specforge {

struct ChatRequest {
  std::string system_prompt;
  std::string user_prompt;
  int max_output_tokens = 800;
  double temperature = 0.0;
  // Caller label, e.g. "draft_background" or "draft_technical:technical-2".
  std::string tag;

  // Throws InvalidInput on blank prompts or tag, or out-of-range settings.
  void validate() const;
  // Part of the tag before the first ':'.
  std::string family() const;
};

struct EmbeddingVector {
  std::vector<double> values;

  size_t dimension() const noexcept { return values.size(); }
};

struct CallLogEntry {
  size_t sequence = 0;
  std::string kind;  // "chat" or "embed"
  std::string tag;
  std::string system_prompt;
  std::string user_prompt;
  std::string response;
  std::string status;  // "ok" or an error code name
  int attempts = 0;
  std::string timestamp;
};

// Append-only record of gateway traffic in completion order.
class CallLog {
 public:
  void append(CallLogEntry entry);
  std::vector<CallLogEntry> entries() const;
  std::vector<std::string> tags() const;
  size_t size() const;

 private:
  mutable std::mutex mu_;
  std::vector<CallLogEntry> entries_;
};

// Raised by backends for failures worth retrying (connection refused, 5xx,
// rate limiting). Anything else propagates as specforge::Error.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
  virtual std::vector<double> embed(std::string_view text) = 0;
  // Advertised embedding length; 0 when the backend learns it on first use.
  virtual size_t embedding_dimension() const = 0;
  virtual std::string name() const = 0;
};

struct GatewayOptions {
  int max_retries = 3;
  std::chrono::milliseconds backoff{500};
  double backoff_multiplier = 2.0;
  int max_concurrency = 4;
};

// Caps in-flight requests per endpoint; shared between per-document gateways.
class ConcurrencyLimiter {
 public:
  explicit ConcurrencyLimiter(int max_in_flight);
  void acquire() { sem_.acquire(); }
  void release() { sem_.release(); }

 private:
  std::counting_semaphore<1024> sem_;
};

class Gateway {
 public:
  Gateway(std::shared_ptr<Backend> backend, GatewayOptions options = {},
          std::shared_ptr<ConcurrencyLimiter> limiter = nullptr);

  // Returns the completion text. Retries transient failures with exponential
  // backoff; throws BackendUnavailable once retries are spent and
  // ResponseEmpty for a blank completion.
  std::string chat(const ChatRequest& request);

  // Throws InvalidInput for blank text, DimensionMismatch when the backend
  // returns a vector of the wrong length or with non-finite entries.
  EmbeddingVector embed(std::string_view text);

  const CallLog& log() const noexcept { return log_; }
  const GatewayOptions& options() const noexcept { return options_; }
  const std::shared_ptr<Backend>& backend() const noexcept { return backend_; }
  const std::shared_ptr<ConcurrencyLimiter>& limiter() const noexcept { return limiter_; }

  // A gateway over the same backend and limiter with its own empty CallLog.
  Gateway fork() const { return Gateway(backend_, options_, limiter_); }

 private:
  template <typename Fn>
  auto with_retries(Fn&& fn, int& attempts) -> decltype(fn());

  std::shared_ptr<Backend> backend_;
  GatewayOptions options_;
  std::shared_ptr<ConcurrencyLimiter> limiter_;
  CallLog log_;
  std::mutex dim_mu_;
  size_t learned_dimension_ = 0;
};

// Deterministic backend for tests and air-gapped dry runs. Chat replies are
// looked up by tag: custom handler first, then an exact-tag script, then a
// script for the tag family, then (if enabled) a canned auto-reply.
class MockBackend : public Backend {
 public:
  using ChatHandler = std::function<std::optional<std::string>(const ChatRequest&)>;
  using EmbedHandler = std::function<std::vector<double>(std::string_view)>;

  explicit MockBackend(size_t embedding_dimension = 8);

  // Responses are served in order; the last one repeats once exhausted.
  void script(const std::string& tag, std::vector<std::string> responses);
  void set_chat_handler(ChatHandler handler);
  void set_embed_handler(EmbedHandler handler);
  void set_unavailable(bool unavailable);
  void set_auto_reply(bool enabled);

  std::string complete(const ChatRequest& request) override;
  std::vector<double> embed(std::string_view text) override;
  size_t embedding_dimension() const override { return dimension_; }
  std::string name() const override { return "mock"; }

  size_t attempts() const;

 private:
  struct Script {
    std::vector<std::string> responses;
    size_t next = 0;
  };

  mutable std::mutex mu_;
  size_t dimension_;
  std::map<std::string, Script> scripts_;
  ChatHandler chat_handler_;
  EmbedHandler embed_handler_;
  bool unavailable_ = false;
  bool auto_reply_ = true;
  size_t attempts_ = 0;
};

// UTC, millisecond precision, ISO-8601.
std::string iso_timestamp_now();

std::uint64_t fnv1a64(std::string_view text);
// Unit vector of the given length seeded from a hash of the text.
std::vector<double> hash_seeded_unit_vector(std::string_view text, size_t dimension);
// Format-valid canned reply for each pipeline tag family.
std::string mock_auto_reply(const ChatRequest& request);

}  // namespace specforge
