#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Lenient HTML tokenization shared by link extraction and the wrapper.
namespace ccnet::html {

struct Token {
  enum class Kind { start_tag, end_tag, text, comment, doctype };

  Kind kind = Kind::text;
  std::string name;  // lower-case tag name for tags
  std::vector<std::pair<std::string, std::string>> attributes;  // lower-case keys, decoded values
  bool self_closing = false;
  std::string data;  // raw (undecoded) character data for text and comments
  std::size_t offset = 0;

  bool is_start(std::string_view tag) const { return kind == Kind::start_tag && name == tag; }
  bool is_end(std::string_view tag) const { return kind == Kind::end_tag && name == tag; }
  const std::string* attribute(std::string_view key) const;
};

/// Never fails; malformed markup degrades to text. The contents of script,
/// style, title and textarea elements come out as a single text token.
std::vector<Token> tokenize(std::string_view html);

/// Decodes named (common subset) and numeric character references. Unknown
/// references are left as written.
std::string decode_entities(std::string_view s);

/// The charset named by a `<meta charset>` or `<meta http-equiv
/// content="...; charset=...">` element, if any.
std::optional<std::string> declared_charset(std::string_view html);

/// Elements whose boundaries separate words when rendered as text.
bool is_block_element(std::string_view tag);

/// Elements that never have content (`<br>`, `<img>` ...).
bool is_void_element(std::string_view tag);

}  // namespace ccnet::html
