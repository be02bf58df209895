#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccnet/clock.hpp"
#include "ccnet/crawler/config.hpp"
#include "ccnet/crawler/fetcher.hpp"

namespace ccnet::crawler {

struct FetchedPage {
  std::string url;  // canonical
  int depth = 0;
  std::string content_type;  // as served, charset parameter included
  std::string body;
  Timestamp fetched_at;
  int status = 0;

  /// Single-line JSON. A body that is not valid UTF-8 is stored byte-wise as
  /// code points U+0000..U+00FF under "body_bytes", so the bytes round-trip.
  std::string to_json() const;
  static FetchedPage from_json(std::string_view line);
  friend bool operator==(const FetchedPage&, const FetchedPage&) = default;
};

enum class Outcome {
  fetched,
  skipped_duplicate,
  skipped_host,
  skipped_depth,
  skipped_limit,
  skipped_content_type,
  error,
};

std::string_view to_string(Outcome o);  // "skipped-duplicate" etc.
std::optional<Outcome> parse_outcome(std::string_view s);

struct CrawlLogEntry {
  std::string url;
  int depth = 0;
  int status = 0;  // 0 for decisions taken without a request
  std::int64_t duration_ms = 0;
  Outcome outcome = Outcome::fetched;
  std::string message;  // error detail; empty otherwise

  std::string to_json() const;  // single line
  static CrawlLogEntry from_json(std::string_view line);
  friend bool operator==(const CrawlLogEntry&, const CrawlLogEntry&) = default;
};

class CrawlLogSink {
 public:
  virtual ~CrawlLogSink() = default;
  virtual void append(const CrawlLogEntry& entry) = 0;
};

/// Append-only NDJSON file; every entry is flushed before append returns.
class JsonlCrawlLog final : public CrawlLogSink {
 public:
  explicit JsonlCrawlLog(const std::filesystem::path& file);
  void append(const CrawlLogEntry& entry) override;
  static std::vector<CrawlLogEntry> read(const std::filesystem::path& file);

 private:
  std::mutex mu_;
  std::ofstream out_;
};

struct CrawlResult {
  std::vector<CrawlLogEntry> log;
  std::size_t fetched = 0;
  std::size_t errors = 0;
};

using PageSink = std::function<void(FetchedPage)>;

struct CrawlOptions {
  Clock* pacing = nullptr;  // politeness waits; SystemClock when null
  Clock* stamps = nullptr;  // fetched_at; `pacing` when null
  CrawlLogSink* log = nullptr;
};

/// Breadth-first crawl. Pages reach `sink` level by level in frontier order;
/// the sink runs on the calling thread.
CrawlResult crawl(const CrawlConfig& config, Fetcher& fetcher, const PageSink& sink, CrawlOptions options = {});

/// Anchor targets of an HTML page resolved against its URL (or <base href>),
/// http(s) only, fragments stripped, first occurrence kept.
std::vector<std::string> extract_links(const FetchedPage& page);

/// text/html, application/xhtml+xml, or an empty type.
bool is_markup(std::string_view content_type);

}  // namespace ccnet::crawler
