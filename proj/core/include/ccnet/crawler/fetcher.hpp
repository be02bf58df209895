#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ccnet/clock.hpp"
#include "ccnet/url.hpp"

namespace ccnet::crawler {

struct FetchResponse {
  int status = 0;  // 0 when no response arrived
  std::string content_type;
  std::string body;
  std::optional<std::string> error;  // transport failure
};

/// Page retrieval capability handed to the crawler. Implementations must be
/// safe to call from several threads for different hosts.
class Fetcher {
 public:
  virtual ~Fetcher() = default;
  virtual FetchResponse fetch(const Url& url, std::chrono::milliseconds timeout) = 0;
};

/// HTTP(S) over cpp-httplib; follows redirects.
class HttpFetcher final : public Fetcher {
 public:
  explicit HttpFetcher(std::string user_agent = "ccnet-crawler/0.1");
  FetchResponse fetch(const Url& url, std::chrono::milliseconds timeout) override;

 private:
  std::string user_agent_;
};

/// Serves files from a local mirror laid out as <root>/<host>/<path>. A path
/// ending in '/' maps to index.html. The query string is ignored.
class MirrorFetcher final : public Fetcher {
 public:
  explicit MirrorFetcher(std::filesystem::path root);
  FetchResponse fetch(const Url& url, std::chrono::milliseconds timeout) override;

 private:
  std::filesystem::path root_;
};

/// In-memory site for tests and demos. Records every request with the time
/// reported by the optional clock.
class StaticFetcher final : public Fetcher {
 public:
  struct Request {
    std::string url;
    Timestamp at;
  };

  explicit StaticFetcher(Clock* clock = nullptr) : clock_(clock) {}

  void add_page(const std::string& url, std::string html, std::string content_type = "text/html; charset=utf-8");
  void add_response(const std::string& url, FetchResponse response);

  FetchResponse fetch(const Url& url, std::chrono::milliseconds timeout) override;

  std::vector<Request> requests() const;

 private:
  Clock* clock_;
  mutable std::mutex mu_;
  std::map<std::string, FetchResponse> pages_;  // keyed by canonical url
  std::vector<Request> requests_;
};

}  // namespace ccnet::crawler
