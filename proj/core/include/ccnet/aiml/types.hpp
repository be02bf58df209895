#pragma once

#include <compare>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ccnet::aiml {

/// A normalized word: lower-case, no whitespace, no surrounding punctuation.
/// Construction validates only the "non-empty, no whitespace" part; use
/// normalize() to produce tokens from arbitrary text.
class Token {
 public:
  explicit Token(std::string text);

  const std::string& text() const { return text_; }

  friend auto operator<=>(const Token&, const Token&) = default;

 private:
  std::string text_;
};

struct Wildcard {
  friend auto operator<=>(const Wildcard&, const Wildcard&) = default;
};

using PatternElement = std::variant<Token, Wildcard>;

/// Ordered literals and wildcards. Never empty; adjacent wildcards are
/// collapsed on construction.
class Pattern {
 public:
  explicit Pattern(std::vector<PatternElement> elements);

  /// "where _ meningitis _". `_` and `*` are wildcards; every other word is
  /// normalized. Throws std::invalid_argument when nothing is left.
  static Pattern parse(std::string_view text);

  std::span<const PatternElement> elements() const { return elements_; }
  std::size_t literal_count() const { return literals_; }
  std::size_t wildcard_count() const { return elements_.size() - literals_; }

  /// Canonical text form; also the duplicate-detection key.
  std::string str() const;

  friend bool operator==(const Pattern& a, const Pattern& b) { return a.elements_ == b.elements_; }

 private:
  std::vector<PatternElement> elements_;
  std::size_t literals_ = 0;
};

/// Animation names from an `<agplay anims="..."/>` tag.
class ExpressionCue {
 public:
  /// Each name must be a lower-case identifier ([a-z][a-z0-9_-]*).
  explicit ExpressionCue(std::vector<std::string> anims);

  /// "greet, pleased" -> [greet, pleased]; names are lower-cased.
  static ExpressionCue parse(std::string_view attribute);

  const std::vector<std::string>& anims() const { return anims_; }
  std::string str() const;  // "greet, pleased"

  friend bool operator==(const ExpressionCue&, const ExpressionCue&) = default;

 private:
  std::vector<std::string> anims_;
};

/// A URL the client should open alongside the answer.
class UrlPush {
 public:
  /// Throws std::invalid_argument unless `url` is absolute with scheme and
  /// host and free of quotes, angle brackets, backslashes and whitespace.
  explicit UrlPush(std::string url);

  const std::string& url() const { return url_; }

  friend bool operator==(const UrlPush&, const UrlPush&) = default;

 private:
  std::string url_;
};

struct Text {
  std::string value;
  friend bool operator==(const Text&, const Text&) = default;
};

using TemplatePart = std::variant<Text, ExpressionCue, UrlPush>;

/// Template parts in canonical form: text parts are whitespace-collapsed and
/// trimmed, empty ones dropped, neighbours merged with one space. The joined
/// text must be non-empty.
class TemplateBody {
 public:
  explicit TemplateBody(std::vector<TemplatePart> parts);
  static TemplateBody from_text(std::string text);

  const std::vector<TemplatePart>& parts() const { return parts_; }
  std::string text() const;
  const ExpressionCue* first_cue() const;
  const UrlPush* first_push() const;

  friend bool operator==(const TemplateBody&, const TemplateBody&) = default;

 private:
  std::vector<TemplatePart> parts_;
};

struct Category {
  Pattern pattern;
  TemplateBody body;
  std::optional<std::string> source_id;

  friend bool operator==(const Category&, const Category&) = default;
};

struct MatchResult {
  std::shared_ptr<const Category> category;
  std::vector<std::vector<Token>> bindings;  // one per wildcard, in order
  std::size_t specificity = 0;               // literal tokens matched
  std::size_t wildcard_tokens = 0;           // query tokens consumed by wildcards
};

struct Response {
  std::string text;
  std::optional<ExpressionCue> cue;
  std::optional<UrlPush> push;
  bool matched = false;
  std::optional<std::string> source_id;
};

}  // namespace ccnet::aiml
