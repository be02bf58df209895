#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ccnet/aiml/types.hpp"

namespace ccnet::aiml {

struct Diagnostic {
  int line = 0;
  std::string message;
};

struct ParsedKnowledge {
  std::vector<Category> categories;
  std::vector<Diagnostic> diagnostics;  // rejected categories
};

/// Parses an `<aiml>` document. Malformed markup throws xml::ParseError
/// (carrying the line number); a category lacking a usable pattern or
/// template is skipped with a diagnostic and the rest still load.
ParsedKnowledge parse_knowledge(std::string_view document);

/// Reads and parses a file; I/O failures throw std::runtime_error.
ParsedKnowledge load_knowledge_file(const std::filesystem::path& path);

/// Recognizes a script body consisting of exactly one
/// `window.open("<absolute url>", ...)` call with string-literal arguments.
std::optional<UrlPush> parse_push_script(std::string_view body);

/// One `<category>` element, formatted like the knowledge files:
///
///   <category>
///   <pattern>where _ meningitis _</pattern>
///   <template>A rare strain of meningitis...
///   <javascript>
///   window.open("http://...", "", "");
///   </javascript>
///   </template>
///   </category>
std::string serialize_category(const Category& c);

/// A complete `<aiml>` document.
std::string serialize_knowledge(std::span<const Category> categories);

}  // namespace ccnet::aiml
