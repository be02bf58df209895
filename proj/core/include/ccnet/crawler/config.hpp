#pragma once

#include <chrono>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ccnet::crawler {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CrawlConfig {
  std::vector<std::string> roots;
  int max_depth = 0;
  int max_pages = 0;
  std::vector<std::string> allowed_hosts;  // lower-case
  std::chrono::milliseconds fetch_delay{1000};
  std::chrono::milliseconds timeout{10000};
  int concurrency = 4;  // hosts fetched in parallel

  /// Throws ConfigError on malformed JSON, wrong field types or a config
  /// that fails validate().
  static CrawlConfig from_json(std::string_view json);
  static CrawlConfig load(const std::filesystem::path& file);
  std::string to_json() const;

  /// Every root must be an absolute http(s) URL whose host is allowed.
  void validate() const;
  bool host_allowed(std::string_view host) const;
};

}  // namespace ccnet::crawler
