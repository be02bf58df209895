#include "ccnet/wrapper/wrapper.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include <json.hpp>

#include "ccnet/html.hpp"

namespace ccnet::wrapper {

using nlohmann::json;
using html::Token;

std::string CleanedNews::to_json() const {
  json j{{"title", title}, {"url", url}, {"date", text::format_iso_date(date)}, {"content", content}};
  if (date_inferred) j["date_inferred"] = true;
  return j.dump();
}

CleanedNews CleanedNews::from_json(std::string_view line) {
  auto j = json::parse(line);
  CleanedNews n;
  n.title = j.at("title").get<std::string>();
  n.url = j.at("url").get<std::string>();
  auto d = text::parse_iso_date(j.at("date").get<std::string>());
  if (!d) throw std::invalid_argument("bad date in cleaned record");
  n.date = *d;
  n.content = j.at("content").get<std::string>();
  n.date_inferred = j.value("date_inferred", false);
  return n;
}

namespace {

// NBSP to a plain space, then collapse.
std::string tidy(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\xC2' && i + 1 < s.size() && s[i + 1] == '\xA0') {
      out += ' ';
      ++i;
    } else {
      out += s[i];
    }
  }
  return text::collapse_whitespace(out);
}

bool is_skipped_raw(std::string_view tag) { return tag == "script" || tag == "style"; }

constexpr std::array<std::string_view, 5> kBoilerplateTags{"nav", "footer", "header", "aside", "noscript"};
constexpr std::array<std::string_view, 9> kBoilerplateNames{"nav",    "navigation", "navbar", "menu",   "footer",
                                                            "header", "sidebar",    "breadcrumb", "masthead"};

bool is_boilerplate(const Token& t) {
  if (std::find(kBoilerplateTags.begin(), kBoilerplateTags.end(), t.name) != kBoilerplateTags.end()) return true;
  for (const char* attr : {"id", "class"}) {
    const auto* v = t.attribute(attr);
    if (!v) continue;
    for (const auto& word : text::split(text::to_lower_ascii(*v), ' '))
      if (std::find(kBoilerplateNames.begin(), kBoilerplateNames.end(), word) != kBoilerplateNames.end()) return true;
  }
  return false;
}

std::string charset_of(const crawler::FetchedPage& page) {
  auto ct = text::to_lower_ascii(page.content_type);
  if (auto pos = ct.find("charset="); pos != std::string::npos) {
    auto cs = ct.substr(pos + 8);
    cs = cs.substr(0, cs.find(';'));
    cs.erase(std::remove(cs.begin(), cs.end(), '"'), cs.end());
    if (!text::trim(cs).empty()) return std::string(text::trim(cs));
  }
  if (auto declared = html::declared_charset(page.body)) return *declared;
  return "utf-8";
}

// Tokens with boilerplate subtrees and script/style bodies removed.
std::vector<Token> content_tokens(const std::vector<Token>& tokens) {
  std::vector<Token> out;
  std::string dropping;  // tag name of the open boilerplate element
  int depth = 0;
  std::string raw;  // open script/style element
  for (const auto& t : tokens) {
    if (!raw.empty()) {
      if (t.is_end(raw)) raw.clear();
      continue;
    }
    if (t.kind == Token::Kind::start_tag && is_skipped_raw(t.name) && !t.self_closing) {
      raw = t.name;
      continue;
    }
    if (!dropping.empty()) {
      if (t.is_start(dropping) && !t.self_closing) ++depth;
      if (t.is_end(dropping) && --depth == 0) dropping.clear();
      continue;
    }
    if (t.kind == Token::Kind::start_tag && !t.self_closing && !html::is_void_element(t.name) && is_boilerplate(t)) {
      dropping = t.name;
      depth = 1;
      continue;
    }
    if (t.kind == Token::Kind::comment || t.kind == Token::Kind::doctype) continue;
    out.push_back(t);
  }
  return out;
}

struct Run {
  std::vector<std::string> paragraphs;
  std::size_t length = 0;
};

// Paragraph text grouped into runs of adjacent <p> elements. A block-level
// tag other than <p>/<br>, or non-blank text between paragraphs, ends a run.
std::vector<Run> paragraph_runs(const std::vector<Token>& tokens) {
  std::vector<Run> runs(1);
  bool in_p = false;
  std::string buf;
  auto close_p = [&] {
    if (!in_p) return;
    in_p = false;
    auto p = tidy(html::decode_entities(buf));
    buf.clear();
    if (p.empty()) return;
    runs.back().length += p.size();
    runs.back().paragraphs.push_back(std::move(p));
  };
  auto break_run = [&] {
    if (!runs.back().paragraphs.empty()) runs.emplace_back();
  };
  bool in_title = false;
  for (const auto& t : tokens) {
    if (t.is_start("title")) in_title = true;
    if (t.is_end("title")) in_title = false;
    switch (t.kind) {
      case Token::Kind::start_tag:
        if (t.name == "p") {
          close_p();
          in_p = true;
        } else if (t.name == "br") {
          if (in_p) buf += ' ';
        } else if (html::is_block_element(t.name)) {
          close_p();
          break_run();
        }
        break;
      case Token::Kind::end_tag:
        if (t.name == "p") {
          close_p();
        } else if (html::is_block_element(t.name) && t.name != "br") {
          close_p();
          break_run();
        }
        break;
      case Token::Kind::text:
        if (in_p) {
          buf += t.data;
        } else if (!in_title && !text::trim(tidy(html::decode_entities(t.data))).empty()) {
          break_run();
        }
        break;
      default:
        break;
    }
  }
  close_p();
  return runs;
}

std::string body_text(const std::vector<Token>& tokens) {
  std::string out;
  bool in_head = false, in_title = false;
  for (const auto& t : tokens) {
    if (t.is_start("head")) in_head = true;
    if (t.is_end("head") || t.is_start("body")) in_head = false;
    if (t.is_start("title")) in_title = true;
    if (t.is_end("title")) in_title = false;
    if (t.kind == Token::Kind::text) {
      if (in_head || in_title) continue;
      out += html::decode_entities(t.data);
      out += ' ';
    } else if (html::is_block_element(t.name)) {
      out += ' ';
    }
  }
  return tidy(out);
}

std::string title_of(const std::vector<Token>& raw_tokens, const std::vector<Token>& content) {
  for (std::size_t i = 0; i + 1 < raw_tokens.size(); ++i)
    if (raw_tokens[i].is_start("title") && raw_tokens[i + 1].kind == Token::Kind::text) {
      auto t = tidy(html::decode_entities(raw_tokens[i + 1].data));
      if (!t.empty()) return t;
    }
  static constexpr std::array<std::string_view, 6> kHeadings{"h1", "h2", "h3", "h4", "h5", "h6"};
  for (std::size_t i = 0; i < content.size(); ++i) {
    const auto& t = content[i];
    if (t.kind != Token::Kind::start_tag ||
        std::find(kHeadings.begin(), kHeadings.end(), t.name) == kHeadings.end())
      continue;
    std::string buf;
    for (std::size_t j = i + 1; j < content.size() && !content[j].is_end(t.name); ++j)
      if (content[j].kind == Token::Kind::text) buf += content[j].data;
    auto h = tidy(html::decode_entities(buf));
    if (!h.empty()) return h;
  }
  return {};
}

// A literal '<' directly before a letter reads as a tag; keep the text but
// separate them.
std::string defuse_angles(std::string s) {
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (s[i] == '<' && std::isalpha(static_cast<unsigned char>(s[i + 1]))) s.insert(i + 1, 1, ' ');
  return s;
}

}  // namespace

std::string strip_markup(std::string_view fragment) {
  std::string out;
  std::string raw;
  for (const auto& t : html::tokenize(fragment)) {
    if (!raw.empty()) {
      if (t.is_end(raw)) raw.clear();
      continue;
    }
    switch (t.kind) {
      case Token::Kind::text:
        out += html::decode_entities(t.data);
        break;
      case Token::Kind::start_tag:
        if (is_skipped_raw(t.name) && !t.self_closing) raw = t.name;
        [[fallthrough]];
      case Token::Kind::end_tag:
        if (html::is_block_element(t.name)) out += ' ';
        break;
      default:
        break;
    }
  }
  return tidy(out);
}

std::string strip_dateline(std::string_view paragraph) {
  auto date = text::find_first_date(paragraph);
  if (!date || !text::trim(paragraph.substr(0, date->span.begin)).empty()) return std::string(paragraph);
  auto rest = paragraph.substr(date->span.end);
  // "| PLACE --" is optional between the date and the dash.
  auto limit = std::min<std::size_t>(rest.size(), 80);
  static constexpr std::array<std::string_view, 3> kDashes{"--", "\xE2\x80\x94", "\xE2\x80\x93"};
  for (std::size_t i = 0; i < limit; ++i) {
    for (auto dash : kDashes) {
      if (rest.substr(i, dash.size()) != dash) continue;
      auto between = text::trim(rest.substr(0, i));
      if (!between.empty() && between.front() != '|' && between.front() != ',') return std::string(paragraph);
      return std::string(text::trim(rest.substr(i + dash.size())));
    }
    if (rest[i] == '.' || rest[i] == '\n') break;
  }
  return std::string(paragraph);
}

CleanedNews clean(const crawler::FetchedPage& page) {
  auto decoded = text::decode_charset(page.body, charset_of(page));
  auto tokens = html::tokenize(decoded);
  auto content = content_tokens(tokens);

  CleanedNews n;
  n.url = page.url;
  n.title = defuse_angles(title_of(tokens, content));
  if (n.title.empty()) throw CleaningFailed("no title: " + page.url);

  auto runs = paragraph_runs(content);
  const Run* best = nullptr;
  for (const auto& r : runs)
    if (!r.paragraphs.empty() && (!best || r.length > best->length)) best = &r;
  if (!best) throw CleaningFailed("no paragraph content: " + page.url);

  if (auto d = text::find_first_date(body_text(content))) {
    n.date = d->date;
  } else {
    n.date = text::to_date(page.fetched_at);
    n.date_inferred = true;
  }

  auto paragraphs = best->paragraphs;
  paragraphs.front() = strip_dateline(paragraphs.front());
  for (const auto& p : paragraphs) {
    if (p.empty()) continue;
    if (!n.content.empty()) n.content += "\n\n";
    n.content += p;
  }
  n.content = defuse_angles(std::move(n.content));
  if (n.content.empty()) throw CleaningFailed("empty content: " + page.url);
  return n;
}

}  // namespace ccnet::wrapper
