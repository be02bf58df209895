#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccnet/aiml/types.hpp"

namespace ccnet::aiml {

/// Keyword -> expression cue table, read from lines of `keyword<TAB>cue1,cue2`
/// (`#` starts a comment). Keywords may be phrases; they are normalized like
/// user input.
class EmotionLexicon {
 public:
  struct Entry {
    std::vector<Token> keyword;
    ExpressionCue cue;
  };

  /// Throws std::invalid_argument naming the offending line.
  static EmotionLexicon parse(std::string_view tsv);
  static EmotionLexicon load(const std::filesystem::path& path);

  void add(std::string_view keyword, ExpressionCue cue);

  /// Cue of the first keyword occurrence in `text` (longest keyword wins at a
  /// position); absent when no keyword occurs.
  std::optional<ExpressionCue> classify(std::string_view text) const;

  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

}  // namespace ccnet::aiml
