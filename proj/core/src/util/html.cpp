#include "ccnet/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "ccnet/text.hpp"

namespace ccnet::html {

const std::string* Token::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes)
    if (k == key) return &v;
  return nullptr;
}

namespace {

struct NamedEntity {
  std::string_view name;
  char32_t cp;
};

constexpr std::array<NamedEntity, 44> kEntities{{
    {"amp", '&'},       {"lt", '<'},        {"gt", '>'},         {"quot", '"'},      {"apos", '\''},
    {"nbsp", 0xA0},     {"copy", 0xA9},     {"reg", 0xAE},       {"trade", 0x2122},  {"mdash", 0x2014},
    {"ndash", 0x2013},  {"hellip", 0x2026}, {"lsquo", 0x2018},   {"rsquo", 0x2019},  {"ldquo", 0x201C},
    {"rdquo", 0x201D},  {"laquo", 0xAB},    {"raquo", 0xBB},     {"eacute", 0xE9},   {"egrave", 0xE8},
    {"aacute", 0xE1},   {"agrave", 0xE0},   {"ccedil", 0xE7},    {"uuml", 0xFC},     {"ouml", 0xF6},
    {"auml", 0xE4},     {"Eacute", 0xC9},   {"iacute", 0xED},    {"oacute", 0xF3},   {"uacute", 0xFA},
    {"ntilde", 0xF1},   {"deg", 0xB0},      {"middot", 0xB7},    {"bull", 0x2022},   {"times", 0xD7},
    {"euro", 0x20AC},   {"pound", 0xA3},    {"yen", 0xA5},       {"cent", 0xA2},     {"sect", 0xA7},
    {"para", 0xB6},     {"shy", 0xAD},      {"acirc", 0xE2},     {"ecirc", 0xEA},
}};

// References that browsers accept without the trailing semicolon.
constexpr std::array<std::string_view, 5> kLegacy{"amp", "lt", "gt", "quot", "nbsp"};

std::optional<char32_t> lookup(std::string_view name) {
  for (const auto& e : kEntities)
    if (e.name == name) return e.cp;
  return std::nullopt;
}

constexpr std::array<std::string_view, 4> kRawText{"script", "style", "title", "textarea"};

bool is_raw_text(std::string_view tag) {
  return std::find(kRawText.begin(), kRawText.end(), tag) != kRawText.end();
}

std::size_t find_icase(std::string_view hay, std::string_view needle, std::size_t from) {
  if (needle.empty()) return from;
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i)
    if (text::equals_icase(hay.substr(i, needle.size()), needle)) return i;
  return std::string_view::npos;
}

}  // namespace

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out += s[i++];
      continue;
    }
    std::size_t j = i + 1;
    if (j < s.size() && s[j] == '#') {
      ++j;
      bool hex = j < s.size() && (s[j] == 'x' || s[j] == 'X');
      if (hex) ++j;
      std::size_t start = j;
      char32_t cp = 0;
      while (j < s.size() && j - start < 8) {
        auto c = static_cast<unsigned char>(s[j]);
        int v = -1;
        if (std::isdigit(c)) v = c - '0';
        else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
        if (v < 0) break;
        cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(v);
        ++j;
      }
      if (j == start) {
        out += s[i++];
        continue;
      }
      if (j < s.size() && s[j] == ';') ++j;
      if (cp == 0) cp = 0xFFFD;
      text::append_utf8(out, cp);
      i = j;
      continue;
    }
    std::size_t start = j;
    while (j < s.size() && std::isalnum(static_cast<unsigned char>(s[j])) && j - start < 10) ++j;
    auto name = s.substr(start, j - start);
    bool semi = j < s.size() && s[j] == ';';
    auto cp = lookup(name);
    if (cp && (semi || std::find(kLegacy.begin(), kLegacy.end(), name) != kLegacy.end())) {
      text::append_utf8(out, *cp);
      i = semi ? j + 1 : j;
    } else {
      out += s[i++];
    }
  }
  return out;
}

std::vector<Token> tokenize(std::string_view html) {
  std::vector<Token> out;
  std::size_t i = 0;
  std::string pending_text;
  std::size_t text_offset = 0;
  auto flush = [&] {
    if (pending_text.empty()) return;
    Token t;
    t.kind = Token::Kind::text;
    t.data = std::move(pending_text);
    t.offset = text_offset;
    out.push_back(std::move(t));
    pending_text.clear();
  };
  auto add_text = [&](std::string_view chunk, std::size_t at) {
    if (pending_text.empty()) text_offset = at;
    pending_text.append(chunk);
  };

  while (i < html.size()) {
    if (html[i] != '<') {
      auto next = html.find('<', i);
      if (next == std::string_view::npos) next = html.size();
      add_text(html.substr(i, next - i), i);
      i = next;
      continue;
    }
    auto rest = html.substr(i);
    if (rest.starts_with("<!--")) {
      flush();
      auto end = html.find("-->", i + 4);
      Token t;
      t.kind = Token::Kind::comment;
      t.offset = i;
      t.data = std::string(html.substr(i + 4, (end == std::string_view::npos ? html.size() : end) - i - 4));
      out.push_back(std::move(t));
      i = end == std::string_view::npos ? html.size() : end + 3;
      continue;
    }
    if (rest.starts_with("<!") || rest.starts_with("<?")) {
      flush();
      auto end = html.find('>', i);
      Token t;
      t.kind = Token::Kind::doctype;
      t.offset = i;
      t.data = std::string(html.substr(i + 2, (end == std::string_view::npos ? html.size() : end) - i - 2));
      out.push_back(std::move(t));
      i = end == std::string_view::npos ? html.size() : end + 1;
      continue;
    }
    bool closing = rest.size() > 1 && rest[1] == '/';
    std::size_t name_begin = i + (closing ? 2 : 1);
    if (name_begin >= html.size() || !std::isalpha(static_cast<unsigned char>(html[name_begin]))) {
      add_text("<", i);
      ++i;
      continue;
    }
    flush();
    std::size_t j = name_begin;
    while (j < html.size() && !text::is_space(static_cast<unsigned char>(html[j])) && html[j] != '>' &&
           html[j] != '/')
      ++j;
    Token tag;
    tag.kind = closing ? Token::Kind::end_tag : Token::Kind::start_tag;
    tag.name = text::to_lower_ascii(html.substr(name_begin, j - name_begin));
    tag.offset = i;
    // attributes
    for (;;) {
      while (j < html.size() && (text::is_space(static_cast<unsigned char>(html[j])) || html[j] == '/')) {
        if (html[j] == '/' && j + 1 < html.size() && html[j + 1] == '>') tag.self_closing = true;
        ++j;
      }
      if (j >= html.size()) break;
      if (html[j] == '>') {
        ++j;
        break;
      }
      std::size_t k = j;
      while (k < html.size() && !text::is_space(static_cast<unsigned char>(html[k])) && html[k] != '>' &&
             html[k] != '=' && html[k] != '/')
        ++k;
      if (k == j) {  // stray '='
        ++j;
        continue;
      }
      auto key = text::to_lower_ascii(html.substr(j, k - j));
      j = k;
      while (j < html.size() && text::is_space(static_cast<unsigned char>(html[j]))) ++j;
      std::string value;
      if (j < html.size() && html[j] == '=') {
        ++j;
        while (j < html.size() && text::is_space(static_cast<unsigned char>(html[j]))) ++j;
        if (j < html.size() && (html[j] == '"' || html[j] == '\'')) {
          char q = html[j++];
          auto end = html.find(q, j);
          if (end == std::string_view::npos) end = html.size();
          value = decode_entities(html.substr(j, end - j));
          j = end == html.size() ? end : end + 1;
        } else {
          std::size_t v = j;
          while (v < html.size() && !text::is_space(static_cast<unsigned char>(html[v])) && html[v] != '>') ++v;
          value = decode_entities(html.substr(j, v - j));
          j = v;
        }
      }
      if (!closing && !tag.attribute(key)) tag.attributes.emplace_back(std::move(key), std::move(value));
    }
    i = j;
    bool raw = !closing && !tag.self_closing && is_raw_text(tag.name);
    std::string raw_name = tag.name;
    out.push_back(std::move(tag));
    if (raw) {
      auto end = find_icase(html, "</" + raw_name, i);
      if (end == std::string_view::npos) end = html.size();
      if (end > i) {
        Token t;
        t.kind = Token::Kind::text;
        t.data = std::string(html.substr(i, end - i));
        t.offset = i;
        out.push_back(std::move(t));
      }
      i = end;
    }
  }
  flush();
  return out;
}

std::optional<std::string> declared_charset(std::string_view html) {
  for (const auto& t : tokenize(html)) {
    if (!t.is_start("meta")) continue;
    if (auto cs = t.attribute("charset")) return text::to_lower_ascii(text::trim(*cs));
    auto equiv = t.attribute("http-equiv");
    auto content = t.attribute("content");
    if (equiv && content && text::equals_icase(text::trim(*equiv), "content-type")) {
      auto lower = text::to_lower_ascii(*content);
      auto pos = lower.find("charset=");
      if (pos != std::string::npos) {
        auto value = lower.substr(pos + 8);
        auto end = value.find_first_of("; \t\"'");
        return std::string(text::trim(value.substr(0, end)));
      }
    }
  }
  return std::nullopt;
}

bool is_block_element(std::string_view tag) {
  static constexpr std::array<std::string_view, 38> kBlocks{
      "address", "article", "aside",  "blockquote", "body",   "br",     "caption", "center",
      "dd",      "div",     "dl",     "dt",         "fieldset", "figcaption", "figure", "footer",
      "form",    "h1",      "h2",     "h3",         "h4",     "h5",     "h6",      "header",
      "hr",      "li",      "main",   "nav",        "ol",     "p",      "pre",     "section",
      "table",   "tbody",   "td",     "th",         "tr",     "ul"};
  return std::find(kBlocks.begin(), kBlocks.end(), tag) != kBlocks.end();
}

bool is_void_element(std::string_view tag) {
  static constexpr std::array<std::string_view, 14> kVoid{"area", "base", "br",   "col",   "embed",
                                                          "hr",   "img",  "input", "link", "meta",
                                                          "param", "source", "track", "wbr"};
  return std::find(kVoid.begin(), kVoid.end(), tag) != kVoid.end();
}

}  // namespace ccnet::html
