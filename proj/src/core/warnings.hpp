#pragma once

#include <mutex>
#include <string>
#include <vector>

namespace specforge {

// Append-only, thread-safe collection of non-fatal run warnings.
class WarningLog {
 public:
  void add(std::string message) {
    std::lock_guard lock(mu_);
    entries_.push_back(std::move(message));
  }

  std::vector<std::string> entries() const {
    std::lock_guard lock(mu_);
    return entries_;
  }

  size_t size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
  }

 private:
  mutable std::mutex mu_;
  std::vector<std::string> entries_;
};

}  // namespace specforge
