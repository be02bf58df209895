#include "ccnet/crawler/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ccnet/text.hpp"
#include "ccnet/url.hpp"

namespace ccnet::crawler {

using nlohmann::json;

namespace {

template <typename T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field: ") + key);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("wrong type for field: ") + key);
  }
}

template <typename T>
T optional_field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("wrong type for field: ") + key);
  }
}

}  // namespace

CrawlConfig CrawlConfig::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  CrawlConfig c;
  c.roots = required<std::vector<std::string>>(j, "roots");
  c.max_depth = required<int>(j, "max_depth");
  c.max_pages = required<int>(j, "max_pages");
  c.allowed_hosts = required<std::vector<std::string>>(j, "allowed_hosts");
  for (auto& h : c.allowed_hosts) h = text::to_lower_ascii(h);
  c.fetch_delay = std::chrono::milliseconds(required<long long>(j, "fetch_delay_ms"));
  c.timeout = std::chrono::milliseconds(required<long long>(j, "timeout_ms"));
  c.concurrency = optional_field<int>(j, "concurrency", 4);
  c.validate();
  return c;
}

CrawlConfig CrawlConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read config: " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string CrawlConfig::to_json() const {
  json j{{"roots", roots},
         {"max_depth", max_depth},
         {"max_pages", max_pages},
         {"allowed_hosts", allowed_hosts},
         {"fetch_delay_ms", fetch_delay.count()},
         {"timeout_ms", timeout.count()},
         {"concurrency", concurrency}};
  return j.dump(2);
}

bool CrawlConfig::host_allowed(std::string_view host) const {
  auto h = text::to_lower_ascii(host);
  return std::find(allowed_hosts.begin(), allowed_hosts.end(), h) != allowed_hosts.end();
}

void CrawlConfig::validate() const {
  if (max_depth < 0) throw ConfigError("max_depth must be >= 0");
  if (max_pages < 1) throw ConfigError("max_pages must be >= 1");
  if (fetch_delay.count() < 0) throw ConfigError("fetch_delay_ms must be >= 0");
  if (timeout.count() <= 0) throw ConfigError("timeout_ms must be > 0");
  if (concurrency < 1) throw ConfigError("concurrency must be >= 1");
  for (const auto& r : roots) {
    auto url = Url::try_parse(r);
    if (!url) throw ConfigError("root is not an absolute URL: " + r);
    auto scheme = text::to_lower_ascii(url->scheme());
    if (scheme != "http" && scheme != "https")
      throw ConfigError("root must be http or https: " + r);
    if (!host_allowed(url->host())) throw ConfigError("root host not in allowed_hosts: " + r);
  }
}

}  // namespace ccnet::crawler
