#include "ccnet/xml.hpp"

#include <cctype>

#include "ccnet/text.hpp"

namespace ccnet::xml {

const std::string* Node::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes)
    if (k == key) return &v;
  return nullptr;
}

const Node* Node::first_child(std::string_view element_name) const {
  for (const auto& c : children)
    if (c.is(element_name)) return &c;
  return nullptr;
}

std::vector<const Node*> Node::child_elements(std::string_view element_name) const {
  std::vector<const Node*> out;
  for (const auto& c : children)
    if (c.is(element_name)) out.push_back(&c);
  return out;
}

std::string Node::text_content() const {
  if (is_text()) return text;
  std::string out;
  for (const auto& c : children) out += c.text_content();
  return out;
}

namespace {

bool name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':' || static_cast<unsigned char>(c) >= 0x80;
}

bool name_char(char c) {
  return name_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.';
}

class Reader {
 public:
  explicit Reader(std::string_view doc) : doc_(doc) {}

  Node document() {
    skip_misc();
    if (eof() || peek() != '<') fail("expected root element");
    Node root = element();
    skip_misc();
    if (!eof()) fail("content after root element");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, msg); }

  bool eof() const { return pos_ >= doc_.size(); }
  char peek() const { return doc_[pos_]; }
  bool looking_at(std::string_view s) const { return doc_.substr(pos_).starts_with(s); }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < doc_.size(); ++i, ++pos_)
      if (doc_[pos_] == '\n') ++line_;
  }

  void skip_ws() {
    while (!eof() && text::is_space(static_cast<unsigned char>(peek()))) advance();
  }

  void skip_until(std::string_view terminator, const char* what) {
    auto end = doc_.find(terminator, pos_);
    if (end == std::string_view::npos) fail(std::string("unterminated ") + what);
    advance(end + terminator.size() - pos_);
  }

  // Whitespace, comments, processing instructions and a DOCTYPE outside the root.
  void skip_misc() {
    for (;;) {
      skip_ws();
      if (looking_at("<?")) {
        skip_until("?>", "processing instruction");
      } else if (looking_at("<!--")) {
        skip_until("-->", "comment");
      } else if (looking_at("<!DOCTYPE") || looking_at("<!doctype")) {
        skip_until(">", "doctype");
      } else {
        return;
      }
    }
  }

  std::string name() {
    if (eof() || !name_start(peek())) fail("expected a name");
    std::size_t start = pos_;
    while (!eof() && name_char(peek())) advance();
    return std::string(doc_.substr(start, pos_ - start));
  }

  void reference(std::string& out) {
    // at '&'
    auto semi = doc_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 12) fail("bare '&' in character data");
    auto ent = doc_.substr(pos_ + 1, semi - pos_ - 1);
    if (ent == "amp") out += '&';
    else if (ent == "lt") out += '<';
    else if (ent == "gt") out += '>';
    else if (ent == "quot") out += '"';
    else if (ent == "apos") out += '\'';
    else if (ent.starts_with('#')) {
      char32_t cp = 0;
      bool hex = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X');
      auto digits = ent.substr(hex ? 2 : 1);
      if (digits.empty()) fail("empty character reference");
      for (char c : digits) {
        int v;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
        else fail("bad character reference '&" + std::string(ent) + ";'");
        cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(v);
        if (cp > 0x10FFFF) fail("character reference out of range");
      }
      text::append_utf8(out, cp);
    } else {
      fail("undefined entity '&" + std::string(ent) + ";'");
    }
    advance(semi + 1 - pos_);
  }

  std::string attribute_value() {
    if (eof() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
    char quote = peek();
    advance();
    std::string out;
    while (!eof() && peek() != quote) {
      if (peek() == '<') fail("'<' in attribute value");
      if (peek() == '&') reference(out);
      else {
        out += peek();
        advance();
      }
    }
    if (eof()) fail("unterminated attribute value");
    advance();
    return out;
  }

  Node element() {
    Node node;
    node.line = line_;
    advance();  // '<'
    node.name = name();
    for (;;) {
      bool had_ws = !eof() && text::is_space(static_cast<unsigned char>(peek()));
      skip_ws();
      if (eof()) fail("unterminated start tag <" + node.name + ">");
      if (looking_at("/>")) {
        advance(2);
        return node;
      }
      if (peek() == '>') {
        advance();
        break;
      }
      if (!had_ws) fail("expected whitespace before attribute");
      auto key = name();
      skip_ws();
      if (eof() || peek() != '=') fail("expected '=' after attribute " + key);
      advance();
      skip_ws();
      auto value = attribute_value();
      if (node.attribute(key)) fail("duplicate attribute " + key);
      node.attributes.emplace_back(std::move(key), std::move(value));
    }
    content(node);
    return node;
  }

  void flush_text(Node& parent, std::string& buf, int line) {
    if (buf.empty()) return;
    Node t;
    t.kind = Node::Kind::text;
    t.text = std::move(buf);
    t.line = line;
    parent.children.push_back(std::move(t));
    buf.clear();
  }

  void content(Node& parent) {
    std::string buf;
    int text_line = line_;
    for (;;) {
      if (eof()) fail("missing end tag </" + parent.name + "> (opened on line " + std::to_string(parent.line) + ")");
      if (looking_at("</")) {
        flush_text(parent, buf, text_line);
        advance(2);
        auto closing = name();
        skip_ws();
        if (eof() || peek() != '>') fail("malformed end tag </" + closing);
        if (closing != parent.name)
          fail("mismatched end tag </" + closing + ">, expected </" + parent.name + ">");
        advance();
        return;
      }
      if (looking_at("<!--")) {
        skip_until("-->", "comment");
        continue;
      }
      if (looking_at("<![CDATA[")) {
        advance(9);
        auto end = doc_.find("]]>", pos_);
        if (end == std::string_view::npos) fail("unterminated CDATA section");
        if (buf.empty()) text_line = line_;
        buf.append(doc_.substr(pos_, end - pos_));
        advance(end + 3 - pos_);
        continue;
      }
      if (looking_at("<?")) {
        skip_until("?>", "processing instruction");
        continue;
      }
      if (peek() == '<') {
        flush_text(parent, buf, text_line);
        parent.children.push_back(element());
        continue;
      }
      if (buf.empty()) text_line = line_;
      if (peek() == '&') {
        reference(buf);
      } else {
        buf += peek();
        advance();
      }
    }
  }

  std::string_view doc_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

Node parse(std::string_view document) { return Reader(document).document(); }

std::string escape_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string escape_attribute(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace ccnet::xml
