#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ccnet::text {

/// A half-open byte range [begin, end) into some string.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool overlaps(const Span& other) const { return begin < other.end && other.begin < end; }
  friend bool operator==(const Span&, const Span&) = default;
};

std::string to_lower_ascii(std::string_view s);
std::string to_upper_ascii(std::string_view s);

inline bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

/// Letters, digits and every byte of a multi-byte UTF-8 sequence.
inline bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

std::string_view trim(std::string_view s);

/// Trims and replaces every run of whitespace with a single space.
std::string collapse_whitespace(std::string_view s);

bool starts_with_icase(std::string_view s, std::string_view prefix);
bool equals_icase(std::string_view a, std::string_view b);

std::vector<std::string> split(std::string_view s, char sep);

// UTF-8 handling

void append_utf8(std::string& out, char32_t cp);

/// Replaces every invalid UTF-8 sequence with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

/// Converts bytes in the given charset to UTF-8. Unknown charsets are treated
/// as UTF-8; undecodable bytes become U+FFFD.
std::string decode_charset(std::string_view bytes, std::string_view charset);

// Dates

using Date = std::chrono::year_month_day;

struct DateMatch {
  Date date;
  Span span;
};

/// Every date in document order. Accepted forms: "8 April 2004",
/// "8 APRIL 2004", "April 8, 2004" and "2004-04-08".
std::vector<DateMatch> find_dates(std::string_view s);
std::optional<DateMatch> find_first_date(std::string_view s);

std::string format_iso_date(const Date& d);
std::optional<Date> parse_iso_date(std::string_view s);
/// "8 April 2004"
std::string format_long_date(const Date& d);

// Timestamps

using Timestamp = std::chrono::time_point<std::chrono::system_clock, std::chrono::milliseconds>;

/// ISO 8601 UTC with millisecond precision, e.g. "2004-04-08T12:00:00.000Z".
std::string format_timestamp(Timestamp t);
std::optional<Timestamp> parse_timestamp(std::string_view s);

Date to_date(Timestamp t);

// Sentences

/// Splits plain text into sentence spans. A boundary is a run of '.', '?' or
/// '!' (optionally followed by closing quotes or brackets) that is followed by
/// whitespace and then an upper-case letter, a digit or an opening quote, or
/// by the end of the text. Common abbreviations and single-letter initials do
/// not end a sentence.
std::vector<Span> split_sentences(std::string_view s);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view s);
std::string to_hex(std::uint64_t v);

/// 128 bits from std::random_device as 32 lower-case hex digits.
std::string random_token();

}  // namespace ccnet::text
