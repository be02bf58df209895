#include "ccnet/preprocess/annotate.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ccnet::preprocess {

using text::Span;

ChunkerRules ChunkerRules::parse(std::string_view tsv) {
  ChunkerRules r;
  std::size_t line_no = 0;
  for (const auto& raw : text::split(tsv, '\n')) {
    ++line_no;
    auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fields = text::split(line, '\t');
    auto fail = [&](const std::string& what) {
      throw std::invalid_argument("chunker rules line " + std::to_string(line_no) + ": " + what);
    };
    if (fields.size() != 2) fail("expected word<TAB>class");
    auto cls = text::trim(fields[1]);
    WordClass c;
    if (cls == "det") c = WordClass::det;
    else if (cls == "adj") c = WordClass::adj;
    else if (cls == "noun") c = WordClass::noun;
    else if (cls == "stop") c = WordClass::stop;
    else fail("unknown class: " + std::string(cls));
    auto word = text::trim(fields[0]);
    if (word.empty()) fail("empty word");
    r.add(word, c);
  }
  return r;
}

ChunkerRules ChunkerRules::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read chunker rules: " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void ChunkerRules::add(std::string_view word, WordClass cls) { table_[text::to_lower_ascii(word)] = cls; }

std::optional<WordClass> ChunkerRules::classify(std::string_view word) const {
  auto it = table_.find(text::to_lower_ascii(word));
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

namespace {

// Longest gazetteer surface starting at word k, in words; 0 if none.
std::size_t gazetteer_run(std::string_view s, const std::vector<Span>& w, std::size_t k, std::size_t limit,
                          const Gazetteer& g) {
  std::string key;
  std::size_t best = 0;
  for (std::size_t len = 1; len <= g.max_words() && k + len <= limit; ++len) {
    auto j = k + len - 1;
    if (len > 1) {
      if (!adjacent(s, w[j - 1], w[j])) break;
      key += ' ';
    }
    key += text::to_lower_ascii(s.substr(w[j].begin, w[j].size()));
    if (g.find(key)) best = len;
  }
  return best;
}

}  // namespace

std::vector<Span> chunk_noun_phrases(std::string_view s, const ChunkerRules& rules, const Gazetteer* gazetteer) {
  auto w = word_spans(s);
  auto word = [&](std::size_t k) { return s.substr(w[k].begin, w[k].size()); };
  auto cls = [&](std::size_t k) { return rules.classify(word(k)); };
  auto is_nom = [&](std::size_t k) {
    auto c = cls(k);
    if (c) return *c == WordClass::noun;
    return std::isupper(static_cast<unsigned char>(word(k)[0])) != 0;
  };
  auto joined = [&](std::size_t k) { return k == 0 || adjacent(s, w[k - 1], w[k]); };

  std::vector<Span> out;
  std::size_t i = 0;
  while (i < w.size()) {
    std::size_t j = i;
    if (cls(j) == WordClass::det) ++j;
    while (j < w.size() && (j == i || joined(j)) && cls(j) == WordClass::adj) ++j;
    std::size_t nominals = 0;
    while (j < w.size() && (j == i || joined(j))) {
      std::size_t unit = gazetteer ? gazetteer_run(s, w, j, w.size(), *gazetteer) : 0;
      if (unit == 0 && is_nom(j)) unit = 1;
      if (unit == 0) break;
      j += unit;
      ++nominals;
    }
    if (nominals == 0) {
      ++i;
      continue;
    }
    out.push_back({w[i].begin, w[j - 1].end});
    i = j;
  }
  return out;
}

std::vector<NamedEntity> tag_entities(const std::vector<Span>& spans, std::string_view content,
                                      const Gazetteer& gazetteer, const Ontology&) {
  std::vector<NamedEntity> chosen;
  for (const auto& d : text::find_dates(content)) {
    chosen.push_back({std::string(content.substr(d.span.begin, d.span.size())), "date", d.span, 1.0});
  }

  std::vector<NamedEntity> candidates;
  auto w = word_spans(content);
  for (const auto& span : spans) {
    auto first = std::lower_bound(w.begin(), w.end(), span.begin, [](const Span& x, std::size_t b) { return x.begin < b; });
    auto last = std::lower_bound(first, w.end(), span.end, [](const Span& x, std::size_t e) { return x.end <= e; });
    auto lo = static_cast<std::size_t>(first - w.begin());
    auto hi = static_cast<std::size_t>(last - w.begin());
    for (auto k = lo; k < hi; ++k) {
      std::string key;
      for (std::size_t len = 1; len <= gazetteer.max_words() && k + len <= hi; ++len) {
        auto j = k + len - 1;
        if (len > 1) {
          if (!adjacent(content, w[j - 1], w[j])) break;
          key += ' ';
        }
        key += text::to_lower_ascii(content.substr(w[j].begin, w[j].size()));
        if (const auto* e = gazetteer.find(key)) {
          Span sp{w[k].begin, w[j].end};
          candidates.push_back({std::string(content.substr(sp.begin, sp.size())), e->tag, sp, e->weight});
        }
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const NamedEntity& a, const NamedEntity& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.span.size() != b.span.size()) return a.span.size() > b.span.size();
    if (a.span.begin != b.span.begin) return a.span.begin < b.span.begin;
    return a.tag < b.tag;
  });
  for (auto& c : candidates) {
    bool clash = std::any_of(chosen.begin(), chosen.end(), [&](const NamedEntity& e) { return e.span.overlaps(c.span); });
    if (!clash) chosen.push_back(std::move(c));
  }
  std::sort(chosen.begin(), chosen.end(), [](const NamedEntity& a, const NamedEntity& b) { return a.span.begin < b.span.begin; });
  return chosen;
}

std::string resolve_pronouns(std::string_view content, const std::vector<NamedEntity>& entities,
                             const Ontology& ontology) {
  auto sentences = text::split_sentences(content);
  struct Edit {
    Span span;
    std::string text;
  };
  std::vector<Edit> edits;
  for (std::size_t s = 1; s < sentences.size(); ++s) {
    auto sentence = content.substr(sentences[s].begin, sentences[s].size());
    auto words = word_spans(sentence);
    if (words.empty() || words[0].begin != 0) continue;
    auto pronoun = text::to_lower_ascii(sentence.substr(0, words[0].end));
    auto compatible = [&](const std::string& tag) {
      if (pronoun == "it") return ontology.is_a(tag, "disease") || ontology.is_a(tag, "organization");
      if (pronoun == "he" || pronoun == "she") return ontology.is_a(tag, "person");
      if (pronoun == "they") return ontology.is_a(tag, "organization");
      return false;
    };
    if (pronoun != "it" && pronoun != "he" && pronoun != "she" && pronoun != "they") continue;

    const auto& prev = sentences[s - 1];
    std::set<std::string> distinct;
    const NamedEntity* antecedent = nullptr;
    for (const auto& e : entities) {
      if (e.span.begin < prev.begin || e.span.end > prev.end || !compatible(e.tag)) continue;
      distinct.insert(text::to_lower_ascii(e.surface));
      antecedent = &e;
    }
    if (distinct.size() != 1) continue;
    auto replacement = antecedent->surface;
    replacement[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement[0])));
    edits.push_back({{sentences[s].begin, sentences[s].begin + words[0].end}, std::move(replacement)});
  }
  std::string out;
  std::size_t at = 0;
  for (const auto& e : edits) {
    out.append(content.substr(at, e.span.begin - at));
    out += e.text;
    at = e.span.end;
  }
  out.append(content.substr(at));
  return out;
}

AnnotatedNews annotate(const wrapper::CleanedNews& news, const Gazetteer& gazetteer, const Ontology& ontology,
                       const ChunkerRules& rules) {
  AnnotatedNews out{news, {}};
  auto spans = chunk_noun_phrases(news.content, rules, &gazetteer);
  out.entities = tag_entities(spans, news.content, gazetteer, ontology);
  auto resolved = resolve_pronouns(news.content, out.entities, ontology);
  if (resolved != news.content) {
    out.news.content = std::move(resolved);
    spans = chunk_noun_phrases(out.news.content, rules, &gazetteer);
    out.entities = tag_entities(spans, out.news.content, gazetteer, ontology);
  }
  return out;
}

}  // namespace ccnet::preprocess
