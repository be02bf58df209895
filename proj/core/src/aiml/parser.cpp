#include "ccnet/aiml/parser.hpp"

#include <fstream>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "ccnet/xml.hpp"

namespace ccnet::aiml {

std::optional<UrlPush> parse_push_script(std::string_view body) {
  static const std::regex kWindowOpen(
      R"(^\s*window\.open\(\s*(["'])([^"']*)\1\s*(?:,\s*(["'])[^"']*\3\s*)*\)\s*;?\s*$)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(body.begin(), body.end(), m, kWindowOpen)) return std::nullopt;
  try {
    return UrlPush(m[2].str());
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

namespace {

void collect_parts(const xml::Node& node, std::vector<TemplatePart>& parts) {
  for (const auto& child : node.children) {
    if (child.is_text()) {
      parts.emplace_back(Text{child.text});
    } else if (child.is("agplay")) {
      const auto* anims = child.attribute("anims");
      if (!anims) throw std::invalid_argument("<agplay> without anims attribute");
      parts.emplace_back(ExpressionCue::parse(*anims));
    } else if (child.is("javascript") || child.is("script")) {
      auto body = child.text_content();
      if (auto push = parse_push_script(body))
        parts.emplace_back(std::move(*push));
      else
        parts.emplace_back(Text{std::move(body)});
    } else {
      collect_parts(child, parts);
    }
  }
}

}  // namespace

ParsedKnowledge parse_knowledge(std::string_view document) {
  const auto root = xml::parse(document);
  if (!root.is("aiml")) throw xml::ParseError(root.line, "root element is <" + root.name + ">, expected <aiml>");
  ParsedKnowledge out;
  for (const auto* cat : root.child_elements("category")) {
    const auto* pattern = cat->first_child("pattern");
    const auto* tmpl = cat->first_child("template");
    if (!pattern || !tmpl) {
      out.diagnostics.push_back({cat->line, pattern ? "category without <template>" : "category without <pattern>"});
      continue;
    }
    try {
      auto p = Pattern::parse(pattern->text_content());
      std::vector<TemplatePart> parts;
      collect_parts(*tmpl, parts);
      Category c{std::move(p), TemplateBody(std::move(parts)), std::nullopt};
      if (const auto* src = cat->attribute("source")) c.source_id = *src;
      out.categories.push_back(std::move(c));
    } catch (const std::invalid_argument& e) {
      out.diagnostics.push_back({cat->line, e.what()});
    }
  }
  return out;
}

ParsedKnowledge load_knowledge_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open knowledge file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_knowledge(ss.str());
}

std::string serialize_category(const Category& c) {
  std::string out = "<category";
  if (c.source_id) out += " source=\"" + xml::escape_attribute(*c.source_id) + "\"";
  out += ">\n<pattern>" + c.pattern.str() + "</pattern>\n<template>";
  bool first = true;
  for (const auto& part : c.body.parts()) {
    if (!first) out += '\n';
    first = false;
    if (const auto* t = std::get_if<Text>(&part)) {
      out += xml::escape_text(t->value);
    } else if (const auto* cue = std::get_if<ExpressionCue>(&part)) {
      out += "<agplay anims=\"" + xml::escape_attribute(cue->str()) + "\"/>";
    } else if (const auto* push = std::get_if<UrlPush>(&part)) {
      out += "<javascript>\nwindow.open(\"" + xml::escape_text(push->url()) + "\", \"\", \"\");\n</javascript>";
    }
  }
  out += "\n</template>\n</category>\n";
  return out;
}

std::string serialize_knowledge(std::span<const Category> categories) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<aiml>\n";
  for (const auto& c : categories) out += serialize_category(c);
  out += "</aiml>\n";
  return out;
}

}  // namespace ccnet::aiml
