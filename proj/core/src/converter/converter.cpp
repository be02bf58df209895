#include "ccnet/converter/converter.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "ccnet/aiml/normalize.hpp"
#include "ccnet/text.hpp"
#include "ccnet/xml.hpp"

namespace ccnet::converter {

namespace {

constexpr std::pair<std::string_view, std::string_view> kAliases[] = {
    {"[wh-token corresponding to the ontology tag]", "[wh-token]"},
    {"[disease named_entity]", "[disease]"},
    {"[first two lines of content]", "[excerpt]"},
};

std::string expand_aliases(std::string s) {
  for (const auto& [from, to] : kAliases)
    for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos))
      s.replace(pos, from.size(), to);
  return s;
}

std::vector<PatternPiece> parse_pattern(const xml::Node& node) {
  std::vector<PatternPiece> out;
  std::istringstream words(expand_aliases(node.text_content()));
  std::string w;
  while (words >> w) {
    if (w == "[wh-token]") out.emplace_back(PatternSlot::wh);
    else if (w == "[disease]") out.emplace_back(PatternSlot::disease);
    else if (w == "_" || w == "*") out.emplace_back(PatternSlot::wildcard);
    else if (w.front() == '[') throw TemplateError(node.line, "unknown pattern placeholder " + w);
    else
      for (const auto& t : aiml::normalize(w)) out.emplace_back(t.text());
  }
  return out;
}

std::vector<BodyPiece> parse_body(const xml::Node& node) {
  std::vector<BodyPiece> out;
  for (const auto& child : node.children) {
    if (child.is_text()) {
      auto s = expand_aliases(child.text);
      std::size_t at = 0;
      for (auto pos = s.find("[excerpt]"); pos != std::string::npos; pos = s.find("[excerpt]", at)) {
        out.emplace_back(aiml::Text{s.substr(at, pos - at)});
        out.emplace_back(BodySlot::excerpt);
        at = pos + 9;
      }
      out.emplace_back(aiml::Text{s.substr(at)});
    } else if (child.is("agplay")) {
      const auto* anims = child.attribute("anims");
      if (!anims) throw TemplateError(child.line, "<agplay> needs an anims attribute");
      out.emplace_back(aiml::ExpressionCue::parse(*anims));
    } else if (child.is("javascript") || child.is("script")) {
      auto body = child.text_content();
      if (body.find("window.open") == std::string::npos || body.find("[url]") == std::string::npos)
        throw TemplateError(child.line, "script must be window.open(\"[url]\", ...)");
      out.emplace_back(BodySlot::url);
    } else {
      throw TemplateError(child.line, "unexpected <" + child.name + "> in template");
    }
  }
  return out;
}

template <typename Piece, typename Slot>
std::size_t count_slot(const std::vector<Piece>& pieces, Slot slot) {
  return static_cast<std::size_t>(std::count_if(pieces.begin(), pieces.end(), [&](const Piece& p) {
    const auto* s = std::get_if<Slot>(&p);
    return s && *s == slot;
  }));
}

std::vector<aiml::Token> tokens_of(std::string_view s) { return aiml::normalize(s); }

}  // namespace

void TemplateSpec::validate() const {
  if (name.empty()) throw TemplateError(0, "template without a name");
  if (count_slot(pattern, PatternSlot::wh) != 1) throw TemplateError(0, name + ": pattern needs [wh-token] exactly once");
  if (count_slot(pattern, PatternSlot::disease) != 1) throw TemplateError(0, name + ": pattern needs [disease] exactly once");
  if (count_slot(body, BodySlot::excerpt) != 1) throw TemplateError(0, name + ": template needs [excerpt] exactly once");
  if (count_slot(body, BodySlot::url) != 1) throw TemplateError(0, name + ": template needs [url] exactly once");
}

TemplateBank::TemplateBank(std::vector<TemplateSpec> templates) : templates_(std::move(templates)) {
  if (templates_.empty()) throw TemplateError(0, "template bank is empty");
  std::set<std::string> names;
  for (const auto& t : templates_) {
    t.validate();
    if (!names.insert(t.name).second) throw TemplateError(0, "duplicate template name: " + t.name);
  }
}

TemplateBank TemplateBank::parse(std::string_view document) {
  xml::Node root;
  try {
    root = xml::parse(document);
  } catch (const xml::ParseError& e) {
    throw TemplateError(e.line(), e.what());
  }
  if (!root.is("templatebank")) throw TemplateError(root.line, "root element must be <templatebank>");
  std::vector<TemplateSpec> specs;
  for (const auto* cat : root.child_elements("category")) {
    TemplateSpec spec;
    if (const auto* name = cat->attribute("name")) spec.name = *name;
    const auto* pattern = cat->first_child("pattern");
    const auto* body = cat->first_child("template");
    if (!pattern || !body) throw TemplateError(cat->line, "category needs <pattern> and <template>");
    spec.pattern = parse_pattern(*pattern);
    spec.body = parse_body(*body);
    try {
      spec.validate();
    } catch (const TemplateError& e) {
      throw TemplateError(cat->line, e.what());
    }
    specs.push_back(std::move(spec));
  }
  return TemplateBank(std::move(specs));
}

TemplateBank TemplateBank::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw TemplateError(0, "cannot read template bank: " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::vector<std::string> resolve_wh(std::string_view tag, const preprocess::Ontology& ontology) {
  return ontology.wh(tag);
}

std::string excerpt(std::string_view content) {
  auto sentences = text::split_sentences(content);
  if (sentences.empty()) return text::collapse_whitespace(content);
  auto end = sentences[std::min<std::size_t>(2, sentences.size()) - 1].end;
  auto out = text::collapse_whitespace(content.substr(0, end));
  if (text::trim(content.substr(end)).empty()) return out;
  if (out.ends_with("...")) return out;
  if (out.ends_with('.')) out.pop_back();
  return out + "...";
}

std::vector<aiml::Category> instantiate(const TemplateSpec& spec, const repository::NewsRecord& record,
                                        const preprocess::Ontology& ontology) {
  const preprocess::NamedEntity* disease = nullptr;
  std::vector<const preprocess::NamedEntity*> others;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : record.entities) {
    if (ontology.is_a(e.tag, "disease")) {
      if (!disease || e.weight > disease->weight) disease = &e;
    } else if (seen.emplace(text::to_lower_ascii(e.surface), e.tag).second) {
      others.push_back(&e);
    }
  }
  if (!disease) throw ConversionSkipped("no disease entity in record " + record.id);

  std::vector<std::string> forms;
  if (others.empty()) {
    forms = resolve_wh(disease->tag, ontology);
  } else {
    for (const auto* e : others)
      for (const auto& f : resolve_wh(e->tag, ontology)) forms.push_back(f);
  }

  auto clip = excerpt(record.content);
  std::vector<aiml::TemplatePart> body;
  for (const auto& piece : spec.body) {
    if (const auto* t = std::get_if<aiml::Text>(&piece)) body.emplace_back(*t);
    else if (const auto* c = std::get_if<aiml::ExpressionCue>(&piece)) body.emplace_back(*c);
    else if (std::get<BodySlot>(piece) == BodySlot::excerpt) body.emplace_back(aiml::Text{clip});
    else body.emplace_back(aiml::UrlPush(record.url));
  }
  aiml::TemplateBody tb(std::move(body));

  std::vector<aiml::Category> out;
  for (const auto& form : forms) {
    std::vector<aiml::PatternElement> elems;
    for (const auto& piece : spec.pattern) {
      if (const auto* lit = std::get_if<std::string>(&piece)) {
        elems.emplace_back(aiml::Token(*lit));
        continue;
      }
      switch (std::get<PatternSlot>(piece)) {
        case PatternSlot::wildcard: elems.emplace_back(aiml::Wildcard{}); break;
        case PatternSlot::wh:
          for (auto& t : tokens_of(form)) elems.emplace_back(std::move(t));
          break;
        case PatternSlot::disease:
          for (auto& t : tokens_of(disease->surface)) elems.emplace_back(std::move(t));
          break;
      }
    }
    out.push_back({aiml::Pattern(std::move(elems)), tb, record.id});
  }
  return out;
}

Conversion convert_all(std::vector<repository::NewsRecord> records, const TemplateBank& bank,
                       const preprocess::Ontology& ontology) {
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    if (a.date != b.date) return a.date > b.date;
    return a.id < b.id;
  });
  Conversion out;
  for (const auto& r : records) {
    try {
      for (const auto& spec : bank.templates()) {
        auto cats = instantiate(spec, r, ontology);
        out.categories.insert(out.categories.end(), std::make_move_iterator(cats.begin()),
                              std::make_move_iterator(cats.end()));
      }
    } catch (const ConversionSkipped& e) {
      spdlog::info("converter: skipped {}: {}", r.url, e.what());
      out.skipped.push_back({r.id, e.what()});
    }
  }
  return out;
}

std::size_t populate(aiml::KnowledgeBase& kb, const std::vector<aiml::Category>& categories) {
  for (const auto& c : categories) kb.insert(c);
  return categories.size();
}

}  // namespace ccnet::converter
