#include "ccnet/aiml/knowledge_base.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace ccnet::aiml {

std::optional<std::vector<std::vector<Token>>> match_pattern(const Pattern& pattern, std::span<const Token> query) {
  const auto elems = pattern.elements();
  const std::size_t m = elems.size();
  const std::size_t n = query.size();
  // can[i][j]: elements [i, m) match query [j, n)
  std::vector<char> can((m + 1) * (n + 1), 0);
  auto at = [&](std::size_t i, std::size_t j) -> char& { return can[i * (n + 1) + j]; };
  at(m, n) = 1;
  for (std::size_t i = m; i-- > 0;) {
    const auto* lit = std::get_if<Token>(&elems[i]);
    for (std::size_t j = n + 1; j-- > 0;) {
      if (lit)
        at(i, j) = j < n && query[j] == *lit && at(i + 1, j + 1);
      else
        at(i, j) = at(i + 1, j) || (j < n && at(i, j + 1));
    }
  }
  if (!at(0, 0)) return std::nullopt;

  std::vector<std::vector<Token>> bindings;
  std::size_t j = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (std::holds_alternative<Token>(elems[i])) {
      ++j;
      continue;
    }
    std::size_t k = j;
    while (!at(i + 1, k)) ++k;
    bindings.emplace_back(query.begin() + static_cast<std::ptrdiff_t>(j), query.begin() + static_cast<std::ptrdiff_t>(k));
    j = k;
  }
  return bindings;
}

namespace {

std::string first_key(const Category& c) {
  const auto& first = c.pattern.elements().front();
  if (auto tok = std::get_if<Token>(&first)) return tok->text();
  return {};
}

}  // namespace

void KnowledgeBase::index_add(std::uint64_t seq, const Category& c) {
  auto key = first_key(c);
  auto& bucket = key.empty() ? wildcard_first_ : by_first_token_[key];
  bucket.insert(std::lower_bound(bucket.begin(), bucket.end(), seq), seq);
}

void KnowledgeBase::index_remove(std::uint64_t seq, const Category& c) {
  auto key = first_key(c);
  auto& bucket = key.empty() ? wildcard_first_ : by_first_token_[key];
  bucket.erase(std::remove(bucket.begin(), bucket.end(), seq), bucket.end());
  if (!key.empty() && bucket.empty()) by_first_token_.erase(key);
}

InsertOutcome KnowledgeBase::insert(Category category) {
  auto key = category.pattern.str();
  auto shared = std::make_shared<const Category>(std::move(category));
  std::unique_lock lock(mu_);
  if (auto it = by_pattern_.find(key); it != by_pattern_.end()) {
    auto seq = it->second;
    auto& slot = by_seq_.at(seq);
    spdlog::debug("knowledge base: pattern '{}' replaced (source {} -> {})", key, slot->source_id.value_or("-"),
                  shared->source_id.value_or("-"));
    index_remove(seq, *slot);
    slot = shared;
    index_add(seq, *slot);
    ++replacements_;
    return InsertOutcome::replaced;
  }
  auto seq = next_seq_++;
  by_seq_.emplace(seq, shared);
  by_pattern_.emplace(std::move(key), seq);
  index_add(seq, *shared);
  return InsertOutcome::inserted;
}

std::size_t KnowledgeBase::remove_source(std::string_view source_id) {
  std::unique_lock lock(mu_);
  std::size_t removed = 0;
  for (auto it = by_seq_.begin(); it != by_seq_.end();) {
    if (it->second->source_id && *it->second->source_id == source_id) {
      index_remove(it->first, *it->second);
      by_pattern_.erase(it->second->pattern.str());
      it = by_seq_.erase(it);
      ++removed;
    } else {
      ++it;
    }
  }
  return removed;
}

std::vector<std::shared_ptr<const Category>> KnowledgeBase::candidates(std::span<const Token> query) const {
  std::shared_lock lock(mu_);
  std::vector<std::uint64_t> seqs = wildcard_first_;
  if (!query.empty())
    if (auto it = by_first_token_.find(query.front().text()); it != by_first_token_.end()) {
      std::vector<std::uint64_t> merged;
      std::merge(seqs.begin(), seqs.end(), it->second.begin(), it->second.end(), std::back_inserter(merged));
      seqs = std::move(merged);
    }
  std::vector<std::shared_ptr<const Category>> out;
  out.reserve(seqs.size());
  for (auto s : seqs) out.push_back(by_seq_.at(s));
  return out;
}

std::optional<MatchResult> KnowledgeBase::match(std::span<const Token> query) const {
  if (query.empty()) return std::nullopt;
  std::optional<MatchResult> best;
  // candidates() is in insertion order, so strict comparisons keep the earliest.
  for (auto& cat : candidates(query)) {
    const auto literals = cat->pattern.literal_count();
    if (literals > query.size()) continue;
    if (best) {
      const auto wild = query.size() - literals;
      if (literals < best->specificity) continue;
      if (literals == best->specificity && wild >= best->wildcard_tokens) continue;
    }
    auto bindings = match_pattern(cat->pattern, query);
    if (!bindings) continue;
    MatchResult r;
    r.category = cat;
    r.bindings = std::move(*bindings);
    r.specificity = literals;
    r.wildcard_tokens = query.size() - literals;
    best = std::move(r);
  }
  return best;
}

std::vector<std::shared_ptr<const Category>> KnowledgeBase::categories() const {
  std::shared_lock lock(mu_);
  std::vector<std::shared_ptr<const Category>> out;
  out.reserve(by_seq_.size());
  for (const auto& [seq, c] : by_seq_) out.push_back(c);
  return out;
}

std::size_t KnowledgeBase::size() const {
  std::shared_lock lock(mu_);
  return by_seq_.size();
}

std::size_t KnowledgeBase::replacements() const {
  std::shared_lock lock(mu_);
  return replacements_;
}

}  // namespace ccnet::aiml
