#include "ccnet/aiml/types.hpp"

#include <stdexcept>

#include "ccnet/aiml/normalize.hpp"
#include "ccnet/text.hpp"
#include "ccnet/url.hpp"

namespace ccnet::aiml {

Token::Token(std::string text) : text_(std::move(text)) {
  if (text_.empty()) throw std::invalid_argument("empty token");
  for (char c : text_)
    if (text::is_space(static_cast<unsigned char>(c)))
      throw std::invalid_argument("token contains whitespace: '" + text_ + "'");
}

Pattern::Pattern(std::vector<PatternElement> elements) {
  for (auto& e : elements) {
    bool wild = std::holds_alternative<Wildcard>(e);
    if (wild && !elements_.empty() && std::holds_alternative<Wildcard>(elements_.back())) continue;
    if (!wild) ++literals_;
    elements_.push_back(std::move(e));
  }
  if (elements_.empty()) throw std::invalid_argument("pattern has no elements");
}

Pattern Pattern::parse(std::string_view text) {
  std::vector<PatternElement> elements;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text::is_space(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !text::is_space(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i) break;
    auto word = text.substr(i, j - i);
    if (word == "_" || word == "*") {
      elements.emplace_back(Wildcard{});
    } else {
      for (auto& tok : normalize(word)) elements.emplace_back(std::move(tok));
    }
    i = j;
  }
  if (elements.empty()) throw std::invalid_argument("empty pattern: '" + std::string(text) + "'");
  return Pattern(std::move(elements));
}

std::string Pattern::str() const {
  std::string out;
  for (const auto& e : elements_) {
    if (!out.empty()) out += ' ';
    if (auto tok = std::get_if<Token>(&e))
      out += tok->text();
    else
      out += '_';
  }
  return out;
}

namespace {

bool valid_anim_name(std::string_view s) {
  if (s.empty() || s[0] < 'a' || s[0] > 'z') return false;
  for (char c : s)
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-')) return false;
  return true;
}

}  // namespace

ExpressionCue::ExpressionCue(std::vector<std::string> anims) : anims_(std::move(anims)) {
  if (anims_.empty()) throw std::invalid_argument("expression cue without animations");
  for (const auto& a : anims_)
    if (!valid_anim_name(a)) throw std::invalid_argument("invalid animation name: '" + a + "'");
}

ExpressionCue ExpressionCue::parse(std::string_view attribute) {
  std::vector<std::string> names;
  for (auto& part : text::split(attribute, ',')) {
    auto name = text::to_lower_ascii(text::trim(part));
    if (!name.empty()) names.push_back(std::move(name));
  }
  return ExpressionCue(std::move(names));
}

std::string ExpressionCue::str() const {
  std::string out;
  for (const auto& a : anims_) {
    if (!out.empty()) out += ", ";
    out += a;
  }
  return out;
}

UrlPush::UrlPush(std::string url) : url_(std::move(url)) {
  for (char c : url_)
    if (c == '"' || c == '\'' || c == '<' || c == '>' || c == '\\' || text::is_space(static_cast<unsigned char>(c)))
      throw std::invalid_argument("URL contains a forbidden character: '" + url_ + "'");
  if (!Url::try_parse(url_)) throw std::invalid_argument("not an absolute URL: '" + url_ + "'");
}

TemplateBody::TemplateBody(std::vector<TemplatePart> parts) {
  for (auto& p : parts) {
    if (auto t = std::get_if<Text>(&p)) {
      auto collapsed = text::collapse_whitespace(t->value);
      if (collapsed.empty()) continue;
      if (!parts_.empty())
        if (auto prev = std::get_if<Text>(&parts_.back())) {
          prev->value += ' ';
          prev->value += collapsed;
          continue;
        }
      parts_.emplace_back(Text{std::move(collapsed)});
    } else {
      parts_.push_back(std::move(p));
    }
  }
  if (text().empty()) throw std::invalid_argument("template body has no text");
}

TemplateBody TemplateBody::from_text(std::string text) { return TemplateBody({Text{std::move(text)}}); }

std::string TemplateBody::text() const {
  std::string out;
  for (const auto& p : parts_)
    if (auto t = std::get_if<Text>(&p)) {
      if (!out.empty()) out += ' ';
      out += t->value;
    }
  return out;
}

const ExpressionCue* TemplateBody::first_cue() const {
  for (const auto& p : parts_)
    if (auto c = std::get_if<ExpressionCue>(&p)) return c;
  return nullptr;
}

const UrlPush* TemplateBody::first_push() const {
  for (const auto& p : parts_)
    if (auto u = std::get_if<UrlPush>(&p)) return u;
  return nullptr;
}

}  // namespace ccnet::aiml
