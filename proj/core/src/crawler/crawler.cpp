#include "ccnet/crawler/crawler.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <map>
#include <set>
#include <thread>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "ccnet/html.hpp"
#include "ccnet/text.hpp"
#include "ccnet/url.hpp"

namespace ccnet::crawler {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Outcome, std::string_view>, 7> kOutcomeNames{{
    {Outcome::fetched, "fetched"},
    {Outcome::skipped_duplicate, "skipped-duplicate"},
    {Outcome::skipped_host, "skipped-host"},
    {Outcome::skipped_depth, "skipped-depth"},
    {Outcome::skipped_limit, "skipped-limit"},
    {Outcome::skipped_content_type, "skipped-content-type"},
    {Outcome::error, "error"},
}};

}  // namespace

std::string_view to_string(Outcome o) {
  for (const auto& [k, name] : kOutcomeNames)
    if (k == o) return name;
  return "error";
}

std::optional<Outcome> parse_outcome(std::string_view s) {
  for (const auto& [k, name] : kOutcomeNames)
    if (name == s) return k;
  return std::nullopt;
}

std::string CrawlLogEntry::to_json() const {
  json j{{"url", url},
         {"depth", depth},
         {"status", status},
         {"duration_ms", duration_ms},
         {"outcome", std::string(crawler::to_string(outcome))}};
  if (!message.empty()) j["message"] = message;
  return j.dump();
}

CrawlLogEntry CrawlLogEntry::from_json(std::string_view line) {
  auto j = json::parse(line);
  CrawlLogEntry e;
  e.url = j.at("url").get<std::string>();
  e.depth = j.at("depth").get<int>();
  e.status = j.at("status").get<int>();
  e.duration_ms = j.at("duration_ms").get<std::int64_t>();
  auto outcome = parse_outcome(j.at("outcome").get<std::string>());
  if (!outcome) throw std::invalid_argument("unknown crawl outcome");
  e.outcome = *outcome;
  e.message = j.value("message", std::string{});
  return e;
}

JsonlCrawlLog::JsonlCrawlLog(const std::filesystem::path& file) : out_(file, std::ios::app | std::ios::binary) {
  if (!out_) throw std::runtime_error("cannot open crawl log: " + file.string());
}

void JsonlCrawlLog::append(const CrawlLogEntry& entry) {
  std::lock_guard lock(mu_);
  out_ << entry.to_json() << '\n';
  out_.flush();
}

std::vector<CrawlLogEntry> JsonlCrawlLog::read(const std::filesystem::path& file) {
  std::vector<CrawlLogEntry> out;
  std::ifstream in(file, std::ios::binary);
  std::string line;
  while (std::getline(in, line))
    if (!text::trim(line).empty()) out.push_back(CrawlLogEntry::from_json(line));
  return out;
}

std::string FetchedPage::to_json() const {
  json j{{"url", url},
         {"depth", depth},
         {"status", status},
         {"content_type", content_type},
         {"fetched_at", text::format_timestamp(fetched_at)}};
  if (text::sanitize_utf8(body) == body) {
    j["body"] = body;
  } else {
    std::string widened;
    for (char c : body) text::append_utf8(widened, static_cast<unsigned char>(c));
    j["body_bytes"] = widened;
  }
  return j.dump();
}

FetchedPage FetchedPage::from_json(std::string_view line) {
  auto j = json::parse(line);
  FetchedPage p;
  p.url = j.at("url").get<std::string>();
  p.depth = j.at("depth").get<int>();
  p.status = j.at("status").get<int>();
  p.content_type = j.at("content_type").get<std::string>();
  auto at = text::parse_timestamp(j.at("fetched_at").get<std::string>());
  if (!at) throw std::invalid_argument("bad fetched_at timestamp");
  p.fetched_at = *at;
  if (j.contains("body")) {
    p.body = j.at("body").get<std::string>();
  } else {
    // Narrow U+0000..U+00FF back to single bytes.
    auto wide = j.at("body_bytes").get<std::string>();
    for (std::size_t i = 0; i < wide.size(); ++i) {
      auto c = static_cast<unsigned char>(wide[i]);
      if (c < 0x80) {
        p.body += static_cast<char>(c);
      } else if ((c == 0xC2 || c == 0xC3) && i + 1 < wide.size()) {
        p.body += static_cast<char>(((c & 0x03) << 6) | (static_cast<unsigned char>(wide[++i]) & 0x3F));
      } else {
        throw std::invalid_argument("body_bytes holds a code point above U+00FF");
      }
    }
  }
  return p;
}

bool is_markup(std::string_view content_type) {
  auto type = text::to_lower_ascii(text::trim(content_type.substr(0, content_type.find(';'))));
  return type.empty() || type == "text/html" || type == "application/xhtml+xml";
}

std::vector<std::string> extract_links(const FetchedPage& page) {
  auto page_url = Url::try_parse(page.url);
  if (!page_url) {
    spdlog::warn("extract_links: page url is not absolute: {}", page.url);
    return {};
  }
  Url base = *page_url;
  std::vector<std::string> out;
  std::set<std::string> seen;
  bool base_seen = false;
  for (const auto& tok : html::tokenize(page.body)) {
    if (tok.kind != html::Token::Kind::start_tag) continue;
    if (tok.name == "base" && !base_seen) {
      base_seen = true;
      if (const auto* href = tok.attribute("href")) {
        try {
          base = page_url->resolve(text::trim(*href));
        } catch (const UrlError&) {
        }
      }
      continue;
    }
    if (tok.name != "a" && tok.name != "area") continue;
    const auto* href = tok.attribute("href");
    if (!href) continue;
    auto ref = text::trim(*href);
    if (ref.empty()) continue;
    std::string target;
    try {
      auto resolved = base.resolve(ref);
      auto scheme = text::to_lower_ascii(resolved.scheme());
      if (scheme != "http" && scheme != "https") continue;
      target = resolved.without_fragment().str();
    } catch (const UrlError&) {
      continue;
    }
    if (seen.insert(target).second) out.push_back(std::move(target));
  }
  return out;
}

namespace {

struct Job {
  std::string url;  // canonical
  int depth = 0;
};

struct JobResult {
  FetchResponse response;
  Timestamp at;
  std::int64_t duration_ms = 0;
};

class Coordinator {
 public:
  Coordinator(const CrawlConfig& config, Fetcher& fetcher, const PageSink& sink, CrawlOptions options)
      : config_(config), fetcher_(fetcher), sink_(sink), opts_(options) {
    if (!opts_.pacing) opts_.pacing = &system_clock_;
    if (!opts_.stamps) opts_.stamps = opts_.pacing;
  }

  CrawlResult run() {
    std::vector<Job> level;
    for (const auto& root : config_.roots) {
      auto url = canonicalize(root);
      if (!seen_.insert(url).second) {
        log({url, 0, 0, 0, Outcome::skipped_duplicate, {}});
        continue;
      }
      level.push_back({url, 0});
    }
    while (!level.empty()) {
      std::vector<Job> next;
      std::size_t i = 0;
      while (i < level.size()) {
        auto budget = static_cast<std::size_t>(config_.max_pages) - result_.fetched;
        if (budget == 0) {
          for (; i < level.size(); ++i) log({level[i].url, level[i].depth, 0, 0, Outcome::skipped_limit, {}});
          break;
        }
        auto end = std::min(level.size(), i + budget);
        std::vector<Job> batch(level.begin() + i, level.begin() + end);
        auto results = fetch_batch(batch);
        for (std::size_t k = 0; k < batch.size(); ++k) settle(batch[k], std::move(results[k]), next);
        i = end;
      }
      level = std::move(next);
    }
    return std::move(result_);
  }

 private:
  void log(CrawlLogEntry e) {
    if (e.outcome == Outcome::error) ++result_.errors;
    if (opts_.log) opts_.log->append(e);
    result_.log.push_back(std::move(e));
  }

  // One worker per host group; a host's requests stay on one worker, in
  // frontier order, so per-host spacing only needs that worker's last stamp.
  std::vector<JobResult> fetch_batch(const std::vector<Job>& batch) {
    struct Group {
      std::string host;
      std::vector<std::size_t> jobs;
      std::optional<Timestamp> last;
    };
    std::vector<Group> groups;
    std::map<std::string, std::size_t> by_host;
    std::vector<Url> urls;
    urls.reserve(batch.size());
    for (std::size_t k = 0; k < batch.size(); ++k) {
      urls.push_back(Url::parse(batch[k].url));
      const auto& host = urls.back().host();
      auto [it, fresh] = by_host.try_emplace(host, groups.size());
      if (fresh) {
        Group g{host, {}, std::nullopt};
        if (auto l = last_request_.find(host); l != last_request_.end()) g.last = l->second;
        groups.push_back(std::move(g));
      }
      groups[it->second].jobs.push_back(k);
    }

    std::vector<JobResult> results(batch.size());
    std::atomic<std::size_t> next_group{0};
    auto work = [&] {
      for (;;) {
        auto g = next_group.fetch_add(1);
        if (g >= groups.size()) return;
        auto& group = groups[g];
        for (auto k : group.jobs) {
          if (group.last) opts_.pacing->sleep_until(*group.last + config_.fetch_delay);
          group.last = opts_.pacing->now();
          auto& r = results[k];
          auto t0 = opts_.stamps->now();
          try {
            r.response = fetcher_.fetch(urls[k], config_.timeout);
          } catch (const std::exception& e) {
            r.response = FetchResponse{};
            r.response.error = e.what();
          }
          r.at = opts_.stamps->now();
          r.duration_ms = (r.at - t0).count();
        }
      }
    };
    auto workers = std::min<std::size_t>(static_cast<std::size_t>(config_.concurrency), groups.size());
    if (workers <= 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    for (const auto& g : groups)
      if (g.last) last_request_[g.host] = *g.last;
    return results;
  }

  void settle(const Job& job, JobResult r, std::vector<Job>& next) {
    auto& resp = r.response;
    if (resp.error) {
      log({job.url, job.depth, resp.status, r.duration_ms, Outcome::error, *resp.error});
      return;
    }
    if (resp.status < 200 || resp.status > 299) {
      log({job.url, job.depth, resp.status, r.duration_ms, Outcome::error, "http " + std::to_string(resp.status)});
      return;
    }
    if (!is_markup(resp.content_type)) {
      log({job.url, job.depth, resp.status, r.duration_ms, Outcome::skipped_content_type, resp.content_type});
      return;
    }
    ++result_.fetched;
    log({job.url, job.depth, resp.status, r.duration_ms, Outcome::fetched, {}});

    FetchedPage page{job.url, job.depth, std::move(resp.content_type), std::move(resp.body), r.at, resp.status};
    for (const auto& link : extract_links(page)) {
      std::string url;
      try {
        url = canonicalize(link);
      } catch (const UrlError& e) {
        continue;
      }
      int depth = job.depth + 1;
      if (!seen_.insert(url).second) {
        log({url, depth, 0, 0, Outcome::skipped_duplicate, {}});
      } else if (!config_.host_allowed(Url::parse(url).host())) {
        log({url, depth, 0, 0, Outcome::skipped_host, {}});
      } else if (depth > config_.max_depth) {
        log({url, depth, 0, 0, Outcome::skipped_depth, {}});
      } else {
        next.push_back({url, depth});
      }
    }
    if (sink_) sink_(std::move(page));
  }

  const CrawlConfig& config_;
  Fetcher& fetcher_;
  const PageSink& sink_;
  CrawlOptions opts_;
  SystemClock system_clock_;
  std::set<std::string> seen_;  // every URL that received a first decision
  std::map<std::string, Timestamp> last_request_;
  CrawlResult result_;
};

}  // namespace

CrawlResult crawl(const CrawlConfig& config, Fetcher& fetcher, const PageSink& sink, CrawlOptions options) {
  config.validate();
  return Coordinator(config, fetcher, sink, options).run();
}

}  // namespace ccnet::crawler
