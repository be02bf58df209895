#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ccnet {

class UrlError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An absolute hierarchical URL (scheme://host[:port]/path?query#fragment).
class Url {
 public:
  /// Throws UrlError unless `text` is an absolute URL with scheme and host.
  static Url parse(std::string_view text);
  static std::optional<Url> try_parse(std::string_view text);

  /// RFC 3986 reference resolution. Throws UrlError when the result is not
  /// an absolute URL with a host (e.g. "mailto:" references).
  Url resolve(std::string_view reference) const;

  /// Lower-case scheme and host, default port dropped, dot segments removed,
  /// empty path becomes "/", fragment removed. Idempotent.
  Url canonical() const;

  Url without_fragment() const;

  const std::string& scheme() const { return scheme_; }
  const std::string& host() const { return host_; }
  std::optional<int> port() const { return port_; }
  const std::string& path() const { return path_; }
  const std::optional<std::string>& query() const { return query_; }
  const std::optional<std::string>& fragment() const { return fragment_; }

  /// Path plus query, as sent in an HTTP request line.
  std::string request_target() const;
  std::string str() const;

  friend bool operator==(const Url& a, const Url& b) { return a.str() == b.str(); }

 private:
  Url() = default;

  std::string scheme_;
  std::string userinfo_;
  std::string host_;
  std::optional<int> port_;
  std::string path_;
  std::optional<std::string> query_;
  std::optional<std::string> fragment_;
};

/// Convenience: Url::parse(text).canonical().str(); throws UrlError.
std::string canonicalize(std::string_view url);

}  // namespace ccnet
