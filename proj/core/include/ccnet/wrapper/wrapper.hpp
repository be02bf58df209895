#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "ccnet/crawler/crawler.hpp"
#include "ccnet/text.hpp"

namespace ccnet::wrapper {

class CleaningFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CleanedNews {
  std::string title;
  std::string url;
  text::Date date;
  std::string content;  // paragraphs separated by "\n\n"
  bool date_inferred = false;  // no date in the body; fetch date used

  std::string to_json() const;  // single line
  static CleanedNews from_json(std::string_view line);
  friend bool operator==(const CleanedNews&, const CleanedNews&) = default;
};

/// Title, date and main text of a news page. Throws CleaningFailed when no
/// title or no paragraph text can be found.
CleanedNews clean(const crawler::FetchedPage& page);

/// Text content of a markup fragment: tags removed, script and style bodies
/// dropped, entities decoded, whitespace (including NBSP) collapsed.
std::string strip_markup(std::string_view fragment);

/// Removes a leading "8 APRIL 2004 | GENEVA -- " style dateline.
std::string strip_dateline(std::string_view paragraph);

}  // namespace ccnet::wrapper
