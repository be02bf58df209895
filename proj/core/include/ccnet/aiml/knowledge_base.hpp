#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ccnet/aiml/types.hpp"

namespace ccnet::aiml {

/// Wildcard captures for one pattern against one query, leftmost-shortest:
/// among all valid splits the vector of wildcard lengths is lexicographically
/// smallest. Absent when the pattern does not match.
std::optional<std::vector<std::vector<Token>>> match_pattern(const Pattern& pattern, std::span<const Token> query);

enum class InsertOutcome { inserted, replaced };

/// The category store behind the chat engine. Many concurrent readers, one
/// writer at a time.
///
/// Matching picks, among categories whose pattern matches the query, the one
/// with the most literal tokens; ties go to the fewest wildcard-consumed
/// tokens and then to the earliest insertion. A category that replaces an
/// identical pattern keeps the original insertion rank.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  KnowledgeBase(const KnowledgeBase&) = delete;
  KnowledgeBase& operator=(const KnowledgeBase&) = delete;

  InsertOutcome insert(Category category);

  /// Removes every category with this source_id; returns how many.
  std::size_t remove_source(std::string_view source_id);

  std::optional<MatchResult> match(std::span<const Token> query) const;

  /// Categories the index proposes for `query`: those whose first element is
  /// the query's first token, plus those starting with a wildcard. Insertion
  /// order.
  std::vector<std::shared_ptr<const Category>> candidates(std::span<const Token> query) const;

  /// Every category, insertion order.
  std::vector<std::shared_ptr<const Category>> categories() const;

  std::size_t size() const;
  std::size_t replacements() const;

 private:
  void index_add(std::uint64_t seq, const Category& c);
  void index_remove(std::uint64_t seq, const Category& c);

  mutable std::shared_mutex mu_;
  std::uint64_t next_seq_ = 0;
  std::size_t replacements_ = 0;
  std::map<std::uint64_t, std::shared_ptr<const Category>> by_seq_;
  std::unordered_map<std::string, std::uint64_t> by_pattern_;
  std::unordered_map<std::string, std::vector<std::uint64_t>> by_first_token_;
  std::vector<std::uint64_t> wildcard_first_;
};

}  // namespace ccnet::aiml
