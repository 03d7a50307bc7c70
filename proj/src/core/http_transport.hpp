#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

namespace specforge {

struct HttpResponse {
  int status = 0;
  std::string body;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

// POSTs a JSON body to an absolute http(s) URL. Connection-level failures and
// 429/5xx responses throw TransportError; other statuses are returned.
HttpResponse http_post_json(const std::string& url, const HttpHeaders& headers, const std::string& body,
                            std::chrono::seconds timeout);

}  // namespace specforge
