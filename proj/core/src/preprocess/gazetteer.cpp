#include "ccnet/preprocess/gazetteer.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ccnet::preprocess {

std::vector<text::Span> word_spans(std::string_view s) {
  std::vector<text::Span> out;
  std::size_t i = 0;
  auto word = [&](std::size_t k) { return k < s.size() && text::is_word_byte(static_cast<unsigned char>(s[k])); };
  while (i < s.size()) {
    if (!word(i)) {
      ++i;
      continue;
    }
    std::size_t b = i;
    while (word(i) || (i < s.size() && (s[i] == '-' || s[i] == '\'') && word(i + 1))) ++i;
    out.push_back({b, i});
  }
  return out;
}

bool adjacent(std::string_view s, const text::Span& a, const text::Span& b) {
  if (b.begin <= a.end) return b.begin == a.end;
  for (auto k = a.end; k < b.begin; ++k)
    if (!text::is_space(static_cast<unsigned char>(s[k]))) return false;
  return true;
}

std::string Gazetteer::key_of(std::string_view surface) {
  std::string key;
  for (const auto& w : word_spans(surface)) {
    if (!key.empty()) key += ' ';
    key += text::to_lower_ascii(surface.substr(w.begin, w.size()));
  }
  return key;
}

void Gazetteer::add(GazetteerEntry entry, const Ontology& ontology) {
  entry.surface = std::string(text::trim(entry.surface));
  if (entry.surface.empty()) throw GazetteerError(0, "empty surface");
  if (!ontology.contains(entry.tag)) throw GazetteerError(0, "tag not in ontology: " + entry.tag);
  if (!(entry.weight > 0) || !std::isfinite(entry.weight)) throw GazetteerError(0, "weight must be positive");
  auto words = word_spans(entry.surface);
  if (words.empty() || words.front().begin != 0 || words.back().end != entry.surface.size())
    throw GazetteerError(0, "surface must start and end with a word: " + entry.surface);
  for (std::size_t k = 1; k < words.size(); ++k)
    if (!adjacent(entry.surface, words[k - 1], words[k]))
      throw GazetteerError(0, "surface words must be separated by spaces only: " + entry.surface);

  auto key = key_of(entry.surface);
  auto it = by_key_.find(key);
  if (it == by_key_.end()) {
    by_key_.emplace(std::move(key), std::move(entry));
  } else {
    auto& cur = it->second;
    if (entry.weight > cur.weight || (entry.weight == cur.weight && entry.tag < cur.tag)) cur = std::move(entry);
  }
  max_words_ = std::max(max_words_, words.size());
}

Gazetteer Gazetteer::parse(std::string_view tsv, const Ontology& ontology) {
  Gazetteer g;
  std::size_t line_no = 0;
  for (const auto& raw : text::split(tsv, '\n')) {
    ++line_no;
    auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fields = text::split(line, '\t');
    if (fields.size() != 3) throw GazetteerError(line_no, "expected surface<TAB>tag<TAB>weight");
    GazetteerEntry e;
    e.surface = std::string(text::trim(fields[0]));
    e.tag = std::string(text::trim(fields[1]));
    auto w = text::trim(fields[2]);
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), e.weight);
    if (ec != std::errc{} || ptr != w.data() + w.size()) throw GazetteerError(line_no, "bad weight: " + std::string(w));
    try {
      g.add(std::move(e), ontology);
    } catch (const GazetteerError& err) {
      throw GazetteerError(line_no, err.what());
    }
  }
  return g;
}

Gazetteer Gazetteer::load(const std::filesystem::path& file, const Ontology& ontology) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw GazetteerError(0, "cannot read gazetteer: " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), ontology);
}

const GazetteerEntry* Gazetteer::find(std::string_view key) const {
  auto it = by_key_.find(key);
  return it == by_key_.end() ? nullptr : &it->second;
}

std::vector<GazetteerEntry> Gazetteer::entries() const {
  std::vector<GazetteerEntry> out;
  out.reserve(by_key_.size());
  for (const auto& [k, e] : by_key_) out.push_back(e);
  return out;
}

}  // namespace ccnet::preprocess
