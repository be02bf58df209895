#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ccnet/preprocess/annotate.hpp"
#include "ccnet/text.hpp"

namespace ccnet::repository {

class RepositoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stable id: 16 hex digits of FNV-1a over the canonical URL.
std::string record_id(std::string_view url);

struct NewsRecord {
  std::string id;
  std::string url;
  text::Date date;
  std::string title;
  std::string content;
  std::vector<preprocess::NamedEntity> entities;
  text::Timestamp ingested_at;

  static NewsRecord from_annotated(const preprocess::AnnotatedNews& news, text::Timestamp ingested_at);

  std::string to_json() const;  // one journal line, no newline
  static NewsRecord from_json(std::string_view line);

  /// Digest of everything except ingested_at.
  std::string revision() const;
  bool same_content(const NewsRecord& other) const { return revision() == other.revision(); }
  bool has_surface(std::string_view surface) const;  // case-insensitive
  friend bool operator==(const NewsRecord&, const NewsRecord&) = default;
};

enum class InsertOutcome { inserted, replaced, unchanged };
std::string_view to_string(InsertOutcome o);

/// Conjunction of the clauses present. Date bounds are inclusive.
struct Filter {
  std::optional<std::string> surface;  // case-insensitive entity surface
  std::optional<std::string> tag;      // exact entity tag
  std::optional<text::Date> from;
  std::optional<text::Date> to;
};

/// News store: NDJSON journal plus an in-memory index rebuilt on open.
/// Single writer, many readers; every read sees one consistent state.
class Repository {
 public:
  using Hook = std::function<void(const NewsRecord&, InsertOutcome)>;

  Repository() = default;  // memory only
  /// Replays `journal` (created when missing); later lines win per id.
  explicit Repository(const std::filesystem::path& journal);

  /// Journal first, then memory: a failed write leaves the store untouched.
  /// Hooks run after the write for inserted and replaced outcomes.
  InsertOutcome insert(NewsRecord record);

  std::optional<NewsRecord> get(std::string_view id) const;
  std::vector<NewsRecord> query(const Filter& filter) const;  // newest date first
  std::vector<NewsRecord> latest(std::size_t limit) const;
  /// Other records sharing at least one entity surface, most shared first,
  /// then newest. Throws RepositoryError for an unknown id.
  std::vector<NewsRecord> related(std::string_view id, std::size_t limit) const;
  std::size_t size() const;

  void on_change(Hook hook);

 private:
  std::vector<NewsRecord> sorted(std::vector<NewsRecord> records) const;

  mutable std::shared_mutex mu_;
  std::map<std::string, NewsRecord, std::less<>> records_;
  std::optional<std::filesystem::path> journal_;
  std::vector<Hook> hooks_;
};

}  // namespace ccnet::repository
