#include "ccnet/url.hpp"

#include <cctype>
#include <vector>

#include "ccnet/text.hpp"

namespace ccnet {

namespace {

struct Reference {
  std::optional<std::string> scheme;
  std::optional<std::string> authority;
  std::string path;
  std::optional<std::string> query;
  std::optional<std::string> fragment;
};

bool valid_scheme(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.') return false;
  return true;
}

Reference split_reference(std::string_view s) {
  Reference r;
  if (auto hash = s.find('#'); hash != std::string_view::npos) {
    r.fragment = std::string(s.substr(hash + 1));
    s = s.substr(0, hash);
  }
  if (auto q = s.find('?'); q != std::string_view::npos) {
    r.query = std::string(s.substr(q + 1));
    s = s.substr(0, q);
  }
  if (auto colon = s.find(':'); colon != std::string_view::npos) {
    auto slash = s.find('/');
    if ((slash == std::string_view::npos || colon < slash) && valid_scheme(s.substr(0, colon))) {
      r.scheme = std::string(s.substr(0, colon));
      s = s.substr(colon + 1);
    }
  }
  if (s.starts_with("//")) {
    s = s.substr(2);
    auto end = s.find('/');
    r.authority = std::string(s.substr(0, end));
    s = end == std::string_view::npos ? std::string_view{} : s.substr(end);
  }
  r.path = std::string(s);
  return r;
}

std::string remove_dot_segments(std::string_view path) {
  std::vector<std::string_view> out;
  bool absolute = path.starts_with('/');
  bool trailing_slash = false;
  std::size_t i = absolute ? 1 : 0;
  while (i <= path.size()) {
    auto end = path.find('/', i);
    if (end == std::string_view::npos) end = path.size();
    auto seg = path.substr(i, end - i);
    bool last = end == path.size();
    if (seg == ".") {
      trailing_slash = last;
    } else if (seg == "..") {
      if (!out.empty()) out.pop_back();
      trailing_slash = last;
    } else {
      out.push_back(seg);
      trailing_slash = false;
    }
    i = end + 1;
  }
  std::string result = absolute ? "/" : "";
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (k) result += '/';
    result += out[k];
  }
  if (trailing_slash && !result.ends_with('/')) result += '/';
  return result;
}

std::string merge_paths(const std::optional<std::string>& base_authority, const std::string& base_path,
                        const std::string& ref_path) {
  if (base_authority && base_path.empty()) return "/" + ref_path;
  auto slash = base_path.rfind('/');
  if (slash == std::string::npos) return ref_path;
  return base_path.substr(0, slash + 1) + ref_path;
}

}  // namespace

std::optional<Url> Url::try_parse(std::string_view text) {
  auto trimmed = text::trim(text);
  auto r = split_reference(trimmed);
  if (!r.scheme || !r.authority) return std::nullopt;
  for (char c : trimmed)
    if (text::is_space(static_cast<unsigned char>(c))) return std::nullopt;
  Url u;
  u.scheme_ = *r.scheme;
  std::string_view auth = *r.authority;
  if (auto at = auth.rfind('@'); at != std::string_view::npos) {
    u.userinfo_ = std::string(auth.substr(0, at));
    auth = auth.substr(at + 1);
  }
  std::string_view host = auth;
  std::string_view port;
  if (auth.starts_with('[')) {
    auto close = auth.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    host = auth.substr(0, close + 1);
    auto rest = auth.substr(close + 1);
    if (!rest.empty()) {
      if (rest[0] != ':') return std::nullopt;
      port = rest.substr(1);
    }
  } else if (auto colon = auth.rfind(':'); colon != std::string_view::npos) {
    host = auth.substr(0, colon);
    port = auth.substr(colon + 1);
  }
  if (host.empty()) return std::nullopt;
  for (char c : host) {
    auto uc = static_cast<unsigned char>(c);
    if (!(std::isalnum(uc) || c == '-' || c == '.' || c == '_' || c == '[' || c == ']' || c == ':' || uc >= 0x80))
      return std::nullopt;
  }
  u.host_ = std::string(host);
  if (!port.empty()) {
    if (port.size() > 5) return std::nullopt;
    int value = 0;
    for (char c : port) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      value = value * 10 + (c - '0');
    }
    if (value > 65535) return std::nullopt;
    u.port_ = value;
  }
  u.path_ = r.path;
  u.query_ = r.query;
  u.fragment_ = r.fragment;
  return u;
}

Url Url::parse(std::string_view text) {
  auto u = try_parse(text);
  if (!u) throw UrlError("not an absolute URL: '" + std::string(text) + "'");
  return *u;
}

Url Url::resolve(std::string_view reference) const {
  auto ref = split_reference(text::trim(reference));
  Reference base;
  base.scheme = scheme_;
  {
    std::string auth = userinfo_.empty() ? host_ : userinfo_ + "@" + host_;
    if (port_) auth += ":" + std::to_string(*port_);
    base.authority = auth;
  }
  base.path = path_;
  base.query = query_;

  Reference target;
  if (ref.scheme) {
    target = ref;
    target.path = remove_dot_segments(ref.path);
  } else {
    if (ref.authority) {
      target.authority = ref.authority;
      target.path = remove_dot_segments(ref.path);
      target.query = ref.query;
    } else {
      if (ref.path.empty()) {
        target.path = base.path;
        target.query = ref.query ? ref.query : base.query;
      } else {
        if (ref.path.starts_with('/'))
          target.path = remove_dot_segments(ref.path);
        else
          target.path = remove_dot_segments(merge_paths(base.authority, base.path, ref.path));
        target.query = ref.query;
      }
      target.authority = base.authority;
    }
    target.scheme = base.scheme;
  }
  target.fragment = ref.fragment;

  std::string out = *target.scheme + ":";
  if (target.authority) out += "//" + *target.authority;
  out += target.path;
  if (target.query) out += "?" + *target.query;
  if (target.fragment) out += "#" + *target.fragment;
  return parse(out);
}

Url Url::canonical() const {
  Url u = *this;
  u.scheme_ = text::to_lower_ascii(scheme_);
  u.host_ = text::to_lower_ascii(host_);
  if (u.port_ && ((u.scheme_ == "http" && *u.port_ == 80) || (u.scheme_ == "https" && *u.port_ == 443)))
    u.port_.reset();
  u.path_ = u.path_.empty() ? "/" : remove_dot_segments(u.path_);
  if (u.path_.empty()) u.path_ = "/";
  u.fragment_.reset();
  return u;
}

Url Url::without_fragment() const {
  Url u = *this;
  u.fragment_.reset();
  return u;
}

std::string Url::request_target() const {
  std::string t = path_.empty() ? "/" : path_;
  if (query_) t += "?" + *query_;
  return t;
}

std::string Url::str() const {
  std::string out = scheme_ + "://";
  if (!userinfo_.empty()) out += userinfo_ + "@";
  out += host_;
  if (port_) out += ":" + std::to_string(*port_);
  out += path_;
  if (query_) out += "?" + *query_;
  if (fragment_) out += "#" + *fragment_;
  return out;
}

std::string canonicalize(std::string_view url) { return Url::parse(url).canonical().str(); }

}  // namespace ccnet
