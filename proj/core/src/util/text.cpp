#include "ccnet/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <ctime>
#include <random>

namespace ccnet::text {

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

std::string to_upper_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  return out;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char ch : s) {
    if (is_space(static_cast<unsigned char>(ch))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(ch);
  }
  return out;
}

bool starts_with_icase(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && equals_icase(s.substr(0, prefix.size()), prefix);
}

bool equals_icase(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto x = static_cast<unsigned char>(a[i]);
    auto y = static_cast<unsigned char>(b[i]);
    if (x >= 'A' && x <= 'Z') x = static_cast<unsigned char>(x - 'A' + 'a');
    if (y >= 'A' && y <= 'Z') y = static_cast<unsigned char>(y - 'A' + 'a');
    if (x != y) return false;
  }
  return true;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(s.substr(start));
      return parts;
    }
    parts.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string sanitize_utf8(std::string_view bytes) {
  std::string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  while (i < bytes.size()) {
    auto c = static_cast<unsigned char>(bytes[i]);
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
      ++i;
      continue;
    }
    std::size_t len = 0;
    char32_t cp = 0;
    if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    }
    bool ok = len != 0 && i + len <= bytes.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      auto cc = static_cast<unsigned char>(bytes[i + k]);
      if ((cc & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Reject overlong forms, surrogates and out-of-range values.
    if (ok) {
      static constexpr std::array<char32_t, 5> min_for_len{0, 0, 0x80, 0x800, 0x10000};
      if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) ok = false;
    }
    if (ok) {
      out.append(bytes.substr(i, len));
      i += len;
    } else {
      append_utf8(out, 0xFFFD);
      ++i;
    }
  }
  return out;
}

namespace {

constexpr std::array<char32_t, 32> kWindows1252High{
    0x20AC, 0xFFFD, 0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021, 0x02C6, 0x2030, 0x0160,
    0x2039, 0x0152, 0xFFFD, 0x017D, 0xFFFD, 0xFFFD, 0x2018, 0x2019, 0x201C, 0x201D, 0x2022,
    0x2013, 0x2014, 0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0xFFFD, 0x017E, 0x0178};

}  // namespace

std::string decode_charset(std::string_view bytes, std::string_view charset) {
  const auto cs = to_lower_ascii(trim(charset));
  const bool latin1 = cs == "iso-8859-1" || cs == "latin1" || cs == "latin-1" || cs == "iso8859-1";
  const bool cp1252 = cs == "windows-1252" || cs == "cp1252";
  if (!latin1 && !cp1252) return sanitize_utf8(bytes);
  std::string out;
  out.reserve(bytes.size() + bytes.size() / 4);
  for (char ch : bytes) {
    auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80 && c < 0xA0 && cp1252)
      append_utf8(out, kWindows1252High[c - 0x80]);
    else
      append_utf8(out, c);
  }
  return out;
}

// Dates

namespace {

struct WordTok {
  Span span;
  bool digits = false;
};

std::vector<WordTok> alnum_runs(std::string_view s) {
  std::vector<WordTok> toks;
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    bool digit = c >= '0' && c <= '9';
    bool alpha = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    if (!digit && !alpha) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size()) {
      auto d = static_cast<unsigned char>(s[j]);
      bool same = digit ? (d >= '0' && d <= '9') : ((d >= 'a' && d <= 'z') || (d >= 'A' && d <= 'Z'));
      if (!same) break;
      ++j;
    }
    toks.push_back({{i, j}, digit});
    i = j;
  }
  return toks;
}

constexpr std::array<std::string_view, 12> kMonths{"january", "february", "march",     "april",
                                                   "may",     "june",     "july",      "august",
                                                   "september", "october", "november", "december"};

unsigned month_number(std::string_view w) {
  for (std::size_t i = 0; i < kMonths.size(); ++i)
    if (equals_icase(w, kMonths[i])) return static_cast<unsigned>(i + 1);
  return 0;
}

int to_int(std::string_view w) {
  int v = 0;
  for (char c : w) v = v * 10 + (c - '0');
  return v;
}

bool only_spaces(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return is_space(static_cast<unsigned char>(c)); });
}

}  // namespace

std::vector<DateMatch> find_dates(std::string_view s) {
  std::vector<DateMatch> out;
  const auto toks = alnum_runs(s);
  auto word = [&](std::size_t i) { return s.substr(toks[i].span.begin, toks[i].span.size()); };
  auto gap = [&](std::size_t i) {  // text between token i and i+1
    return s.substr(toks[i].span.end, toks[i + 1].span.begin - toks[i].span.end);
  };
  // An alphabetic or digit run directly adjacent to another counts as part of
  // a larger word ("A1").
  auto isolated_left = [&](std::size_t i) {
    auto b = toks[i].span.begin;
    return b == 0 || !is_word_byte(static_cast<unsigned char>(s[b - 1]));
  };
  auto isolated_right = [&](std::size_t i) {
    auto e = toks[i].span.end;
    return e == s.size() || !is_word_byte(static_cast<unsigned char>(s[e]));
  };

  std::size_t i = 0;
  while (i < toks.size()) {
    bool matched = false;
    if (i + 2 < toks.size() && isolated_left(i) && isolated_right(i + 2)) {
      const auto& a = toks[i];
      const auto& b = toks[i + 1];
      const auto& c = toks[i + 2];
      // 2004-04-08
      if (a.digits && b.digits && c.digits && a.span.size() == 4 && b.span.size() == 2 &&
          c.span.size() == 2 && gap(i) == "-" && gap(i + 1) == "-") {
        Date d{std::chrono::year{to_int(word(i))}, std::chrono::month{static_cast<unsigned>(to_int(word(i + 1)))},
               std::chrono::day{static_cast<unsigned>(to_int(word(i + 2)))}};
        if (d.ok()) {
          out.push_back({d, {a.span.begin, c.span.end}});
          matched = true;
        }
      }
      // 8 April 2004
      if (!matched && a.digits && a.span.size() <= 2 && !b.digits && c.digits && c.span.size() == 4 &&
          only_spaces(gap(i)) && only_spaces(gap(i + 1))) {
        if (auto m = month_number(word(i + 1))) {
          Date d{std::chrono::year{to_int(word(i + 2))}, std::chrono::month{m},
                 std::chrono::day{static_cast<unsigned>(to_int(word(i)))}};
          if (d.ok()) {
            out.push_back({d, {a.span.begin, c.span.end}});
            matched = true;
          }
        }
      }
      // April 8, 2004
      if (!matched && !a.digits && b.digits && b.span.size() <= 2 && c.digits && c.span.size() == 4 &&
          only_spaces(gap(i))) {
        auto g = gap(i + 1);
        bool sep_ok = only_spaces(g) || (g.size() >= 2 && g[0] == ',' && only_spaces(g.substr(1)));
        auto m = month_number(word(i));
        if (sep_ok && m) {
          Date d{std::chrono::year{to_int(word(i + 2))}, std::chrono::month{m},
                 std::chrono::day{static_cast<unsigned>(to_int(word(i + 1)))}};
          if (d.ok()) {
            out.push_back({d, {a.span.begin, c.span.end}});
            matched = true;
          }
        }
      }
    }
    i += matched ? 3 : 1;
  }
  return out;
}

std::optional<DateMatch> find_first_date(std::string_view s) {
  auto all = find_dates(s);
  if (all.empty()) return std::nullopt;
  return all.front();
}

std::string format_iso_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

std::optional<Date> parse_iso_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9})
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
  Date d{std::chrono::year{to_int(s.substr(0, 4))}, std::chrono::month{static_cast<unsigned>(to_int(s.substr(5, 2)))},
         std::chrono::day{static_cast<unsigned>(to_int(s.substr(8, 2)))}};
  if (!d.ok()) return std::nullopt;
  return d;
}

std::string format_long_date(const Date& d) {
  auto name = std::string(kMonths[static_cast<unsigned>(d.month()) - 1]);
  name[0] = static_cast<char>(name[0] - 'a' + 'A');
  return std::to_string(static_cast<unsigned>(d.day())) + " " + name + " " +
         std::to_string(static_cast<int>(d.year()));
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss tod{t - day_point};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()), static_cast<int>(tod.subseconds().count()));
  return buf;
}

std::optional<Timestamp> parse_timestamp(std::string_view s) {
  // YYYY-MM-DDTHH:MM:SS[.mmm]Z
  if (s.size() < 20) return std::nullopt;
  auto date = parse_iso_date(s.substr(0, 10));
  if (!date || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' || s[16] != ':') return std::nullopt;
  auto digits = [&](std::size_t pos, std::size_t n) -> std::optional<int> {
    if (pos + n > s.size()) return std::nullopt;
    for (std::size_t k = pos; k < pos + n; ++k)
      if (s[k] < '0' || s[k] > '9') return std::nullopt;
    return to_int(s.substr(pos, n));
  };
  auto hh = digits(11, 2), mm = digits(14, 2), ss = digits(17, 2);
  if (!hh || !mm || !ss || *hh > 23 || *mm > 59 || *ss > 60) return std::nullopt;
  std::size_t pos = 19;
  int millis = 0;
  if (pos < s.size() && s[pos] == '.') {
    std::size_t start = ++pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == start) return std::nullopt;
    auto frac = std::string(s.substr(start, pos - start));
    frac.resize(3, '0');
    millis = to_int(frac);
  }
  if (pos + 1 != s.size() || s[pos] != 'Z') return std::nullopt;
  using namespace std::chrono;
  return Timestamp{sys_days{*date}} + hours{*hh} + minutes{*mm} + seconds{*ss} + milliseconds{millis};
}

Date to_date(Timestamp t) { return Date{std::chrono::floor<std::chrono::days>(t)}; }

// Sentences

namespace {

constexpr std::array<std::string_view, 27> kAbbreviations{
    "mr", "mrs", "ms", "dr", "prof", "st", "jr", "sr", "vs", "etc", "e.g", "i.e", "no", "inc",
    "ltd", "co", "corp", "gen", "gov", "sen", "rep", "mt", "ft", "jan", "feb", "aug", "sept"};

bool is_abbreviation(std::string_view word) {
  if (word.empty()) return false;
  // Initials: "J", "U.S".
  bool initials = true;
  for (std::size_t i = 0; i < word.size(); ++i) {
    bool letter = (word[i] >= 'A' && word[i] <= 'Z') || (word[i] >= 'a' && word[i] <= 'z');
    if ((i % 2 == 0 && !letter) || (i % 2 == 1 && word[i] != '.')) initials = false;
  }
  if (initials && word.size() % 2 == 1 && std::isupper(static_cast<unsigned char>(word[0]))) return true;
  auto lower = to_lower_ascii(word);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), lower) != kAbbreviations.end();
}

bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }
bool is_opener(char c) { return c == '"' || c == '\'' || c == '(' || c == '['; }

}  // namespace

std::vector<Span> split_sentences(std::string_view s) {
  std::vector<Span> out;
  std::size_t start = 0;
  auto push = [&](std::size_t b, std::size_t e) {
    while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
    if (b < e) out.push_back({b, e});
  };
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c != '.' && c != '?' && c != '!') {
      ++i;
      continue;
    }
    std::size_t run_begin = i;
    std::size_t j = i;
    while (j < s.size() && (s[j] == '.' || s[j] == '?' || s[j] == '!')) ++j;
    std::size_t run_end = j;
    while (j < s.size() && is_closer(s[j])) ++j;
    std::size_t term_end = j;
    bool boundary = false;
    if (j == s.size()) {
      boundary = true;
    } else if (is_space(static_cast<unsigned char>(s[j]))) {
      std::size_t k = j;
      while (k < s.size() && is_space(static_cast<unsigned char>(s[k]))) ++k;
      if (k == s.size()) {
        boundary = true;
      } else {
        auto n = static_cast<unsigned char>(s[k]);
        boundary = std::isupper(n) || std::isdigit(n) || is_opener(s[k]);
      }
    }
    if (boundary && run_end - run_begin == 1 && s[run_begin] == '.') {
      std::size_t w = run_begin;
      while (w > start && !is_space(static_cast<unsigned char>(s[w - 1])) && s[w - 1] != '(' && s[w - 1] != '"')
        --w;
      if (is_abbreviation(s.substr(w, run_begin - w))) boundary = false;
    }
    if (boundary) {
      push(start, term_end);
      start = term_end;
    }
    i = term_end > i ? term_end : i + 1;
  }
  push(start, s.size());
  return out;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string random_token() {
  thread_local std::random_device rd;
  std::uint64_t hi = (std::uint64_t{rd()} << 32) | rd();
  std::uint64_t lo = (std::uint64_t{rd()} << 32) | rd();
  return to_hex(hi) + to_hex(lo);
}

}  // namespace ccnet::text
