#include "http_transport.hpp"

#include <httplib.h>

#include "errors.hpp"
#include "llm_gateway.hpp"

namespace specforge {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) fail(ErrorCode::InvalidInput, "URL without scheme: " + url);
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") fail(ErrorCode::InvalidInput, "unsupported URL scheme: " + url);
  const size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpResponse http_post_json(const std::string& url, const HttpHeaders& headers, const std::string& body,
                            std::chrono::seconds timeout) {
  const SplitUrl parts = split_url(url);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (parts.origin.rfind("https://", 0) == 0) {
    fail(ErrorCode::BackendUnavailable, "built without TLS support; cannot reach " + parts.origin);
  }
#endif
  httplib::Client client(parts.origin);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Headers hdrs;
  for (const auto& [k, v] : headers) hdrs.emplace(k, v);

  auto res = client.Post(parts.path, hdrs, body, "application/json");
  if (!res) {
    throw TransportError("request to " + url + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    throw TransportError("request to " + url + " returned HTTP " + std::to_string(res->status));
  }
  return HttpResponse{res->status, res->body};
}

}  // namespace specforge
