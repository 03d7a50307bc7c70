#include "llm_gateway.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <set>
#include <thread>

#include "domain.hpp"
#include "errors.hpp"

namespace specforge {

std::string iso_timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

namespace {

class LimiterSlot {
 public:
  explicit LimiterSlot(ConcurrencyLimiter& limiter) : limiter_(limiter) { limiter_.acquire(); }
  ~LimiterSlot() { limiter_.release(); }
  LimiterSlot(const LimiterSlot&) = delete;
  LimiterSlot& operator=(const LimiterSlot&) = delete;

 private:
  ConcurrencyLimiter& limiter_;
};

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

void ChatRequest::validate() const {
  if (trim(system_prompt).empty()) fail(ErrorCode::InvalidInput, "chat request has a blank system prompt");
  if (trim(user_prompt).empty()) fail(ErrorCode::InvalidInput, "chat request has a blank user prompt");
  if (trim(tag).empty()) fail(ErrorCode::InvalidInput, "chat request has no tag");
  if (max_output_tokens <= 0) fail(ErrorCode::InvalidInput, "max_output_tokens must be positive");
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    fail(ErrorCode::InvalidInput, "temperature must be a non-negative number");
  }
}

std::string ChatRequest::family() const { return tag.substr(0, tag.find(':')); }

// ---------------------------------------------------------------------------

void CallLog::append(CallLogEntry entry) {
  std::lock_guard lock(mu_);
  entry.sequence = entries_.size();
  entries_.push_back(std::move(entry));
}

std::vector<CallLogEntry> CallLog::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::vector<std::string> CallLog::tags() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.tag);
  return out;
}

size_t CallLog::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

// ---------------------------------------------------------------------------

ConcurrencyLimiter::ConcurrencyLimiter(int max_in_flight) : sem_(max_in_flight < 1 ? 1 : max_in_flight) {
  if (max_in_flight > 1024) fail(ErrorCode::InvalidInput, "concurrency cap above 1024");
}

Gateway::Gateway(std::shared_ptr<Backend> backend, GatewayOptions options, std::shared_ptr<ConcurrencyLimiter> limiter)
    : backend_(std::move(backend)), options_(options), limiter_(std::move(limiter)) {
  if (!backend_) fail(ErrorCode::InvalidInput, "gateway needs a backend");
  if (options_.max_retries < 0) fail(ErrorCode::InvalidInput, "max_retries must be non-negative");
  if (!limiter_) limiter_ = std::make_shared<ConcurrencyLimiter>(options_.max_concurrency);
}

template <typename Fn>
auto Gateway::with_retries(Fn&& fn, int& attempts) -> decltype(fn()) {
  auto delay = options_.backoff;
  for (;;) {
    ++attempts;
    try {
      LimiterSlot slot(*limiter_);
      return fn();
    } catch (const TransportError& e) {
      if (attempts > options_.max_retries) {
        fail(ErrorCode::BackendUnavailable, "backend '" + backend_->name() + "' unreachable after " +
                                                 std::to_string(attempts) + " attempts: " + e.what());
      }
    }
    if (delay.count() > 0) std::this_thread::sleep_for(delay);
    delay = std::chrono::milliseconds(static_cast<long long>(static_cast<double>(delay.count()) * options_.backoff_multiplier));
  }
}

std::string Gateway::chat(const ChatRequest& request) {
  request.validate();
  CallLogEntry entry;
  entry.kind = "chat";
  entry.tag = request.tag;
  entry.system_prompt = request.system_prompt;
  entry.user_prompt = request.user_prompt;
  std::string reply;
  try {
    reply = with_retries([&] { return backend_->complete(request); }, entry.attempts);
  } catch (const Error& e) {
    entry.status = std::string(error_code_name(e.code()));
    entry.timestamp = iso_timestamp_now();
    log_.append(std::move(entry));
    throw;
  }
  entry.response = reply;
  entry.timestamp = iso_timestamp_now();
  if (trim(reply).empty()) {
    entry.status = std::string(error_code_name(ErrorCode::ResponseEmpty));
    log_.append(std::move(entry));
    fail(ErrorCode::ResponseEmpty, "blank completion for tag '" + request.tag + "'");
  }
  entry.status = "ok";
  log_.append(std::move(entry));
  return reply;
}

EmbeddingVector Gateway::embed(std::string_view text) {
  if (trim(text).empty()) fail(ErrorCode::InvalidInput, "cannot embed blank text");
  CallLogEntry entry;
  entry.kind = "embed";
  entry.tag = "embed";
  entry.user_prompt = std::string(text);
  std::vector<double> values;
  try {
    values = with_retries([&] { return backend_->embed(text); }, entry.attempts);
  } catch (const Error& e) {
    entry.status = std::string(error_code_name(e.code()));
    entry.timestamp = iso_timestamp_now();
    log_.append(std::move(entry));
    throw;
  }
  entry.timestamp = iso_timestamp_now();

  size_t expected = backend_->embedding_dimension();
  {
    std::lock_guard lock(dim_mu_);
    if (expected == 0) {
      if (learned_dimension_ == 0) learned_dimension_ = values.size();
      expected = learned_dimension_;
    }
  }
  std::string problem;
  if (values.empty() || values.size() != expected) {
    problem = "expected dimension " + std::to_string(expected) + ", got " + std::to_string(values.size());
  } else {
    for (double v : values) {
      if (!std::isfinite(v)) problem = "embedding contains a non-finite value";
    }
  }
  if (!problem.empty()) {
    entry.status = std::string(error_code_name(ErrorCode::DimensionMismatch));
    log_.append(std::move(entry));
    fail(ErrorCode::DimensionMismatch, problem);
  }
  entry.status = "ok";
  entry.response = "dimension=" + std::to_string(values.size());
  log_.append(std::move(entry));
  return EmbeddingVector{std::move(values)};
}

// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<double> hash_seeded_unit_vector(std::string_view text, size_t dimension) {
  std::uint64_t state = fnv1a64(text);
  std::vector<double> v(dimension);
  double norm = 0.0;
  for (auto& x : v) {
    // 53 random bits mapped onto [-1, 1).
    x = static_cast<double>(splitmix64(state) >> 11) * (2.0 / 9007199254740992.0) - 1.0;
    norm += x * x;
  }
  if (norm == 0.0) {
    v.front() = 1.0;
    return v;
  }
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

std::string mock_auto_reply(const ChatRequest& request) {
  const std::string family = request.family();
  const std::uint64_t h = fnv1a64(request.tag + "\n" + request.user_prompt);
  char variant[17];
  std::snprintf(variant, sizeof(variant), "%04llx", static_cast<unsigned long long>(h & 0xffff));

  if (family == "extract_concepts") {
    // Long words of the claims block stand in for concept names.
    std::string_view source = request.user_prompt;
    if (const auto pos = source.rfind("CLAIMS:"); pos != std::string_view::npos) source.remove_prefix(pos + 7);
    std::vector<std::string> words;
    std::set<std::string> seen;
    for (const auto& tok : tokenize(source)) {
      if (tok.size() < 9 || !std::all_of(tok.begin(), tok.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); })) {
        continue;
      }
      if (seen.insert(tok).second) words.push_back(tok);
      if (words.size() == 3) break;
    }
    if (words.empty()) words.push_back("mechanism");
    std::string out;
    for (const auto& w : words) {
      out += w + " :: general principles of " + w + " relevant to the described system\n";
    }
    return out;
  }
  if (family == "splice") {
    return "REASONING: The passage expands on the detailed description.\nINSERT_AFTER: [0000]\nREVISED: "
           "In certain embodiments, the arrangement further operates as described below (variant " +
           std::string(variant) + ").";
  }
  if (family == "single_gen") {
    return "ABSTRACT\nA system and method are disclosed (variant " + std::string(variant) +
           ").\n\nBACKGROUND\nThe field relates to technical systems.\n\nSUMMARY\nEmbodiments provide an "
           "arrangement of components.\n\nDETAILED DESCRIPTION\nIn one embodiment, the system includes a first "
           "component.\n\nIn another embodiment, the system includes a second component.";
  }
  return "In one embodiment relating to " + family + " (variant " + std::string(variant) +
         "), the system comprises components arranged to cooperate.\n\nIn a further embodiment, the "
         "components may be configured differently without departing from the scope of the disclosure.";
}

MockBackend::MockBackend(size_t embedding_dimension) : dimension_(embedding_dimension) {
  if (dimension_ == 0) fail(ErrorCode::InvalidInput, "mock embedding dimension must be positive");
}

void MockBackend::script(const std::string& tag, std::vector<std::string> responses) {
  if (responses.empty()) fail(ErrorCode::InvalidInput, "script for '" + tag + "' has no responses");
  std::lock_guard lock(mu_);
  scripts_[tag] = Script{std::move(responses), 0};
}

void MockBackend::set_chat_handler(ChatHandler handler) {
  std::lock_guard lock(mu_);
  chat_handler_ = std::move(handler);
}

void MockBackend::set_embed_handler(EmbedHandler handler) {
  std::lock_guard lock(mu_);
  embed_handler_ = std::move(handler);
}

void MockBackend::set_unavailable(bool unavailable) {
  std::lock_guard lock(mu_);
  unavailable_ = unavailable;
}

void MockBackend::set_auto_reply(bool enabled) {
  std::lock_guard lock(mu_);
  auto_reply_ = enabled;
}

size_t MockBackend::attempts() const {
  std::lock_guard lock(mu_);
  return attempts_;
}

std::string MockBackend::complete(const ChatRequest& request) {
  std::unique_lock lock(mu_);
  ++attempts_;
  if (unavailable_) throw TransportError("mock backend configured as unavailable");
  if (chat_handler_) {
    auto handler = chat_handler_;
    lock.unlock();
    if (auto reply = handler(request)) return *reply;
    lock.lock();
  }
  for (const std::string& key : {request.tag, request.family()}) {
    auto it = scripts_.find(key);
    if (it == scripts_.end()) continue;
    Script& s = it->second;
    const std::string& reply = s.responses[std::min(s.next, s.responses.size() - 1)];
    if (s.next < s.responses.size()) ++s.next;
    return reply;
  }
  if (auto_reply_) return mock_auto_reply(request);
  fail(ErrorCode::InvalidInput, "mock backend has no script for tag '" + request.tag + "'");
}

std::vector<double> MockBackend::embed(std::string_view text) {
  std::unique_lock lock(mu_);
  ++attempts_;
  if (unavailable_) throw TransportError("mock backend configured as unavailable");
  if (embed_handler_) {
    auto handler = embed_handler_;
    lock.unlock();
    return handler(text);
  }
  return hash_seeded_unit_vector(text, dimension_);
}

}  // namespace specforge
