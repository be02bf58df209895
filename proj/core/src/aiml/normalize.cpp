#include "ccnet/aiml/normalize.hpp"

#include "ccnet/text.hpp"

namespace ccnet::aiml {

namespace {

bool is_joiner(char c) { return c == '-' || c == '\'' || c == '.'; }

void flush_piece(std::string_view piece, std::vector<Token>& out) {
  std::size_t b = 0, e = piece.size();
  while (b < e && is_joiner(piece[b])) ++b;
  while (e > b && is_joiner(piece[e - 1])) --e;
  if (b < e) out.emplace_back(text::to_lower_ascii(piece.substr(b, e - b)));
}

}  // namespace

std::vector<Token> normalize(std::string_view raw) {
  std::vector<Token> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= raw.size(); ++i) {
    bool keep = i < raw.size() && (text::is_word_byte(static_cast<unsigned char>(raw[i])) || is_joiner(raw[i]));
    if (keep) continue;
    if (i > start) flush_piece(raw.substr(start, i - start), out);
    start = i + 1;
  }
  return out;
}

std::string join(std::span<const Token> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t.text();
  }
  return out;
}

}  // namespace ccnet::aiml
