#include "ccnet/crawler/fetcher.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>

#include "ccnet/text.hpp"

namespace ccnet::crawler {

HttpFetcher::HttpFetcher(std::string user_agent) : user_agent_(std::move(user_agent)) {}

FetchResponse HttpFetcher::fetch(const Url& url, std::chrono::milliseconds timeout) {
  FetchResponse out;
  std::string origin = url.scheme() + "://" + url.host();
  if (url.port()) origin += ":" + std::to_string(*url.port());
  try {
    httplib::Client client(origin);
    if (!client.is_valid()) {
      out.error = "unsupported scheme: " + url.scheme();
      return out;
    }
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_follow_location(true);
    auto res = client.Get(url.request_target(), {{"User-Agent", user_agent_}});
    if (!res) {
      out.error = httplib::to_string(res.error());
      return out;
    }
    out.status = res->status;
    out.content_type = res->get_header_value("Content-Type");
    out.body = std::move(res->body);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

MirrorFetcher::MirrorFetcher(std::filesystem::path root) : root_(std::move(root)) {}

namespace {

std::string content_type_for(const std::filesystem::path& p) {
  auto ext = text::to_lower_ascii(p.extension().string());
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".xhtml") return "application/xhtml+xml";
  if (ext == ".txt") return "text/plain";
  if (ext == ".pdf") return "application/pdf";
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  return "application/octet-stream";
}

}  // namespace

FetchResponse MirrorFetcher::fetch(const Url& url, std::chrono::milliseconds) {
  FetchResponse out;
  auto canon = url.canonical();
  std::string rel = canon.path();
  if (rel.ends_with('/')) rel += "index.html";
  // Dot segments are already gone after canonicalization, so the path cannot
  // climb above the host directory.
  auto file = root_ / canon.host() / std::filesystem::path(rel.substr(1));
  std::error_code ec;
  if (std::filesystem::is_directory(file, ec)) file /= "index.html";
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    out.status = 404;
    out.content_type = "text/plain";
    out.body = "not found";
    return out;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  out.status = 200;
  out.content_type = content_type_for(file);
  out.body = ss.str();
  return out;
}

void StaticFetcher::add_page(const std::string& url, std::string html, std::string content_type) {
  add_response(url, FetchResponse{200, std::move(content_type), std::move(html), std::nullopt});
}

void StaticFetcher::add_response(const std::string& url, FetchResponse response) {
  std::lock_guard lock(mu_);
  pages_[canonicalize(url)] = std::move(response);
}

FetchResponse StaticFetcher::fetch(const Url& url, std::chrono::milliseconds) {
  std::lock_guard lock(mu_);
  auto key = url.canonical().str();
  requests_.push_back({key, clock_ ? clock_->now() : Timestamp{}});
  if (auto it = pages_.find(key); it != pages_.end()) return it->second;
  FetchResponse out;
  out.error = "connection refused";
  return out;
}

std::vector<StaticFetcher::Request> StaticFetcher::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

}  // namespace ccnet::crawler
