#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ccnet/text.hpp"

namespace ccnet::pipeline {

/// Bad or missing configuration; the CLI exits 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Stage { crawl, clean, annotate, convert, all };
std::string_view to_string(Stage s);
std::optional<Stage> parse_stage(std::string_view s);

/// Artifact layout. Stage files live under `out`:
///   pages.jsonl      fetched pages (crawl -> clean)
///   crawl_log.jsonl  one decision per line
///   cleaned.jsonl    cleaned news (clean -> annotate)
/// The repository journal and the knowledge file default to
/// out/news.jsonl and out/kb.aiml.
struct Options {
  std::optional<std::filesystem::path> crawl_config;  // required by crawl
  std::filesystem::path gazetteer;
  std::filesystem::path ontology;
  std::filesystem::path chunker_rules;
  std::filesystem::path templates;
  std::filesystem::path out = ".";
  std::optional<std::filesystem::path> repo;
  std::optional<std::filesystem::path> kb;
  std::optional<std::filesystem::path> mirror;  // serve fetches from a local mirror tree
  std::optional<text::Timestamp> timestamp;     // pins fetched_at and ingested_at

  std::filesystem::path repo_path() const { return repo ? *repo : out / "news.jsonl"; }
  std::filesystem::path kb_path() const { return kb ? *kb : out / "kb.aiml"; }
  std::filesystem::path pages_path() const { return out / "pages.jsonl"; }
  std::filesystem::path crawl_log_path() const { return out / "crawl_log.jsonl"; }
  std::filesystem::path cleaned_path() const { return out / "cleaned.jsonl"; }
};

/// Per-item problems (a 404, a page without article text, a record without a
/// disease) are counted; `errors` holds only hard failures such as unreadable
/// inputs or unwritable outputs.
struct StageSummary {
  Stage stage;
  std::map<std::string, std::size_t> counts;
  std::vector<std::string> errors;
};

struct PipelineRun {
  std::vector<StageSummary> stages;
  bool ok() const;
  std::string text() const;  // one human line per stage
  std::string json() const;  // {"ok": .., "stages": [{"stage", "counts", "errors"}]}
};

/// Runs one stage, or all four in order (stopping after a stage with hard
/// errors). Throws ConfigError before touching any output when a config or
/// resource file is missing or invalid. Outputs are rewritten only when their
/// bytes change.
PipelineRun run(Stage stage, const Options& options);

/// Writes `bytes` to `file` through a temporary unless the file already holds
/// exactly these bytes; returns whether it wrote.
bool write_if_changed(const std::filesystem::path& file, std::string_view bytes);

}  // namespace ccnet::pipeline
