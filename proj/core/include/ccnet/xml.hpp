#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// A small, strict XML reader: enough for AIML knowledge files and the
// template bank. No namespaces, no DTD processing.
namespace ccnet::xml {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct Node {
  enum class Kind { element, text };

  Kind kind = Kind::element;
  std::string name;  // element name; empty for text
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Node> children;
  std::string text;  // decoded character data for text nodes
  int line = 1;

  bool is_element() const { return kind == Kind::element; }
  bool is_text() const { return kind == Kind::text; }
  bool is(std::string_view element_name) const { return is_element() && name == element_name; }

  const std::string* attribute(std::string_view key) const;
  const Node* first_child(std::string_view element_name) const;
  std::vector<const Node*> child_elements(std::string_view element_name) const;
  /// Concatenated text of all descendant text nodes.
  std::string text_content() const;
};

/// Parses a document and returns its root element.
Node parse(std::string_view document);

std::string escape_text(std::string_view s);
std::string escape_attribute(std::string_view s);

}  // namespace ccnet::xml
