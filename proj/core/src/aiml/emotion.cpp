#include "ccnet/aiml/emotion.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ccnet/aiml/normalize.hpp"
#include "ccnet/text.hpp"

namespace ccnet::aiml {

EmotionLexicon EmotionLexicon::parse(std::string_view tsv) {
  EmotionLexicon lex;
  int line_no = 0;
  for (auto& raw : text::split(tsv, '\n')) {
    ++line_no;
    auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw std::invalid_argument("emotion lexicon line " + std::to_string(line_no) + ": expected keyword<TAB>cues");
    try {
      lex.add(text::trim(line.substr(0, tab)), ExpressionCue::parse(line.substr(tab + 1)));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("emotion lexicon line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return lex;
}

EmotionLexicon EmotionLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open emotion lexicon " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void EmotionLexicon::add(std::string_view keyword, ExpressionCue cue) {
  auto tokens = normalize(keyword);
  if (tokens.empty()) throw std::invalid_argument("empty emotion keyword");
  entries_.push_back({std::move(tokens), std::move(cue)});
}

std::optional<ExpressionCue> EmotionLexicon::classify(std::string_view text) const {
  const auto tokens = normalize(text);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Entry* best = nullptr;
    for (const auto& e : entries_) {
      if (e.keyword.size() > tokens.size() - i) continue;
      if (best && e.keyword.size() <= best->keyword.size()) continue;
      if (std::equal(e.keyword.begin(), e.keyword.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i)))
        best = &e;
    }
    if (best) return best->cue;
  }
  return std::nullopt;
}

}  // namespace ccnet::aiml
