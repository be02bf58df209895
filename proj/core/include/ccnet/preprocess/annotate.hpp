#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccnet/preprocess/gazetteer.hpp"
#include "ccnet/preprocess/ontology.hpp"
#include "ccnet/text.hpp"
#include "ccnet/wrapper/wrapper.hpp"

namespace ccnet::preprocess {

enum class WordClass { det, adj, noun, stop };

/// Closed-class word table for the chunker: `word<TAB>det|adj|noun|stop`,
/// '#' comments. Lookups are case-insensitive.
class ChunkerRules {
 public:
  static ChunkerRules parse(std::string_view tsv);
  static ChunkerRules load(const std::filesystem::path& file);

  void add(std::string_view word, WordClass cls);
  std::optional<WordClass> classify(std::string_view word) const;
  std::size_t size() const { return table_.size(); }

 private:
  std::map<std::string, WordClass, std::less<>> table_;
};

/// Noun phrases per DET? ADJ* NOM+, where NOM is a dictionary noun, a
/// capitalised word the table does not classify, or (when a gazetteer is
/// given) a whole gazetteer surface. Words must be separated by whitespace
/// only. Spans are ordered and disjoint.
std::vector<text::Span> chunk_noun_phrases(std::string_view content, const ChunkerRules& rules,
                                           const Gazetteer* gazetteer = nullptr);

struct NamedEntity {
  std::string surface;  // content[span]
  std::string tag;
  text::Span span;
  double weight = 1.0;

  std::string rendered() const { return surface + "[" + tag + "]"; }
  friend bool operator==(const NamedEntity&, const NamedEntity&) = default;
};

/// Gazetteer hits inside the phrase spans plus pattern-matched dates over the
/// whole content. Overlaps go to the higher weight, then the longer match,
/// then the leftmost; dates take precedence over gazetteer hits. The result
/// is sorted by span and pairwise disjoint.
std::vector<NamedEntity> tag_entities(const std::vector<text::Span>& spans, std::string_view content,
                                      const Gazetteer& gazetteer, const Ontology& ontology);

/// Replaces a sentence-initial It/He/She/They by the single compatible entity
/// of the previous sentence (it: disease or organization; he, she: person;
/// they: organization). Ambiguous or absent antecedents leave the text as is.
std::string resolve_pronouns(std::string_view content, const std::vector<NamedEntity>& entities,
                             const Ontology& ontology);

struct AnnotatedNews {
  wrapper::CleanedNews news;
  std::vector<NamedEntity> entities;
};

/// chunk, tag, resolve pronouns, then chunk and tag the rewritten text.
AnnotatedNews annotate(const wrapper::CleanedNews& news, const Gazetteer& gazetteer, const Ontology& ontology,
                       const ChunkerRules& rules);

}  // namespace ccnet::preprocess
