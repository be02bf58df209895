#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ccnet/preprocess/ontology.hpp"
#include "ccnet/text.hpp"

namespace ccnet::preprocess {

class GazetteerError : public std::runtime_error {
 public:
  GazetteerError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct GazetteerEntry {
  std::string surface;
  std::string tag;
  double weight = 1.0;
  friend bool operator==(const GazetteerEntry&, const GazetteerEntry&) = default;
};

/// Word spans of `s`: runs of letters, digits and non-ASCII bytes, with
/// inner hyphens and apostrophes kept ("re-emerged", "d'Ivoire").
std::vector<text::Span> word_spans(std::string_view s);

/// True when only whitespace separates the two spans (a before b).
bool adjacent(std::string_view s, const text::Span& a, const text::Span& b);

/// Surface-to-tag reference list. Lookups are case-insensitive on whole
/// words. Immutable once built; safe to share across threads.
class Gazetteer {
 public:
  /// `surface<TAB>tag<TAB>weight` lines, '#' comments. Errors name the line.
  static Gazetteer parse(std::string_view tsv, const Ontology& ontology);
  static Gazetteer load(const std::filesystem::path& file, const Ontology& ontology);

  /// A repeated surface keeps the higher weight (then the smaller tag), so
  /// the result does not depend on insertion order.
  void add(GazetteerEntry entry, const Ontology& ontology);

  /// Lower-case words of `surface` joined by single spaces.
  static std::string key_of(std::string_view surface);
  const GazetteerEntry* find(std::string_view key) const;
  std::size_t max_words() const { return max_words_; }
  std::size_t size() const { return by_key_.size(); }
  std::vector<GazetteerEntry> entries() const;  // by key

 private:
  std::map<std::string, GazetteerEntry, std::less<>> by_key_;
  std::size_t max_words_ = 0;
};

}  // namespace ccnet::preprocess
