#include "ccnet/pipeline/pipeline.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "ccnet/aiml/parser.hpp"
#include "ccnet/clock.hpp"
#include "ccnet/converter/converter.hpp"
#include "ccnet/crawler/config.hpp"
#include "ccnet/crawler/crawler.hpp"
#include "ccnet/crawler/fetcher.hpp"
#include "ccnet/preprocess/annotate.hpp"
#include "ccnet/preprocess/gazetteer.hpp"
#include "ccnet/preprocess/ontology.hpp"
#include "ccnet/repository/repository.hpp"
#include "ccnet/wrapper/wrapper.hpp"

namespace ccnet::pipeline {

namespace {

constexpr Stage kOrder[] = {Stage::crawl, Stage::clean, Stage::annotate, Stage::convert};

// Raised inside a stage for a hard failure; the stage records it and stops.
class StageFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Resources {
  std::optional<crawler::CrawlConfig> crawl;
  std::optional<preprocess::Ontology> ontology;
  std::optional<preprocess::Gazetteer> gazetteer;
  std::optional<preprocess::ChunkerRules> rules;
  std::optional<converter::TemplateBank> templates;
};

bool needs(Stage run, Stage part) { return run == Stage::all || run == part; }

template <typename F>
auto load_or_config_error(const char* what, const std::filesystem::path& file, F&& f) {
  if (!std::filesystem::exists(file)) throw ConfigError(std::string(what) + " not found: " + file.string());
  try {
    return f();
  } catch (const std::exception& e) {
    throw ConfigError(std::string(what) + " " + file.string() + ": " + e.what());
  }
}

Resources load_resources(Stage stage, const Options& o) {
  Resources r;
  if (needs(stage, Stage::crawl)) {
    if (!o.crawl_config) throw ConfigError("crawl needs --config");
    r.crawl = load_or_config_error("crawl config", *o.crawl_config, [&] { return crawler::CrawlConfig::load(*o.crawl_config); });
    if (o.mirror && !std::filesystem::is_directory(*o.mirror))
      throw ConfigError("mirror directory not found: " + o.mirror->string());
  }
  if (needs(stage, Stage::annotate) || needs(stage, Stage::convert))
    r.ontology = load_or_config_error("ontology", o.ontology, [&] { return preprocess::Ontology::load(o.ontology); });
  if (needs(stage, Stage::annotate)) {
    r.gazetteer = load_or_config_error("gazetteer", o.gazetteer,
                                       [&] { return preprocess::Gazetteer::load(o.gazetteer, *r.ontology); });
    r.rules = load_or_config_error("chunker rules", o.chunker_rules,
                                   [&] { return preprocess::ChunkerRules::load(o.chunker_rules); });
  }
  if (needs(stage, Stage::convert))
    r.templates =
        load_or_config_error("template bank", o.templates, [&] { return converter::TemplateBank::load(o.templates); });
  return r;
}

std::vector<std::string> read_input(const std::filesystem::path& file, const char* producer) {
  std::ifstream in(file);
  if (!in) throw StageFailed("missing input " + file.string() + " (run " + producer + " first)");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

void write_output(const std::filesystem::path& file, const std::string& bytes) {
  try {
    if (write_if_changed(file, bytes)) spdlog::info("wrote {}", file.string());
  } catch (const std::exception& e) {
    throw StageFailed(e.what());
  }
}

text::Timestamp stamp(const Options& o) {
  return o.timestamp ? *o.timestamp : SystemClock().now();
}

void run_crawl(const Options& o, const Resources& r, StageSummary& s) {
  std::unique_ptr<crawler::Fetcher> fetcher;
  if (o.mirror) fetcher = std::make_unique<crawler::MirrorFetcher>(*o.mirror);
  else fetcher = std::make_unique<crawler::HttpFetcher>();
  SystemClock pacing;
  std::optional<PinnedClock> pinned;
  if (o.timestamp) pinned.emplace(*o.timestamp);

  std::string pages;
  auto result = crawler::crawl(
      *r.crawl, *fetcher, [&](crawler::FetchedPage p) { pages += p.to_json() + "\n"; },
      {&pacing, pinned ? &*pinned : nullptr, nullptr});
  std::string log;
  std::size_t skipped = 0;
  for (const auto& e : result.log) {
    log += e.to_json() + "\n";
    if (e.outcome != crawler::Outcome::fetched && e.outcome != crawler::Outcome::error) ++skipped;
  }
  s.counts["fetched"] = result.fetched;
  s.counts["fetch_errors"] = result.errors;
  s.counts["skipped"] = skipped;
  s.counts["decisions"] = result.log.size();
  write_output(o.pages_path(), pages);
  write_output(o.crawl_log_path(), log);
}

void run_clean(const Options& o, const Resources&, StageSummary& s) {
  auto lines = read_input(o.pages_path(), "crawl");
  std::string out;
  std::size_t pages = 0, cleaned = 0, skipped = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    crawler::FetchedPage page;
    try {
      page = crawler::FetchedPage::from_json(lines[i]);
    } catch (const std::exception& e) {
      throw StageFailed(o.pages_path().string() + ":" + std::to_string(i + 1) + ": " + e.what());
    }
    ++pages;
    try {
      out += wrapper::clean(page).to_json() + "\n";
      ++cleaned;
    } catch (const wrapper::CleaningFailed& e) {
      spdlog::info("clean: skipped {}: {}", page.url, e.what());
      ++skipped;
    }
  }
  s.counts["pages"] = pages;
  s.counts["cleaned"] = cleaned;
  s.counts["skipped"] = skipped;
  write_output(o.cleaned_path(), out);
}

void run_annotate(const Options& o, const Resources& r, StageSummary& s) {
  auto lines = read_input(o.cleaned_path(), "clean");
  std::optional<repository::Repository> repo;
  try {
    repo.emplace(o.repo_path());
  } catch (const std::exception& e) {
    throw StageFailed(e.what());
  }
  const auto at = stamp(o);
  std::size_t records = 0, entities = 0;
  std::map<repository::InsertOutcome, std::size_t> outcomes;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    wrapper::CleanedNews news;
    try {
      news = wrapper::CleanedNews::from_json(lines[i]);
    } catch (const std::exception& e) {
      throw StageFailed(o.cleaned_path().string() + ":" + std::to_string(i + 1) + ": " + e.what());
    }
    auto annotated = preprocess::annotate(news, *r.gazetteer, *r.ontology, *r.rules);
    entities += annotated.entities.size();
    try {
      ++outcomes[repo->insert(repository::NewsRecord::from_annotated(annotated, at))];
    } catch (const repository::RepositoryError& e) {
      throw StageFailed(e.what());
    }
    ++records;
  }
  s.counts["records"] = records;
  s.counts["entities"] = entities;
  s.counts["inserted"] = outcomes[repository::InsertOutcome::inserted];
  s.counts["replaced"] = outcomes[repository::InsertOutcome::replaced];
  s.counts["unchanged"] = outcomes[repository::InsertOutcome::unchanged];
}

void run_convert(const Options& o, const Resources& r, StageSummary& s) {
  std::vector<repository::NewsRecord> records;
  try {
    records = repository::Repository(o.repo_path()).query({});
  } catch (const std::exception& e) {
    throw StageFailed(e.what());
  }
  auto conv = converter::convert_all(records, *r.templates, *r.ontology);
  // The newest record owns a pattern several records would produce.
  std::vector<aiml::Category> kept;
  std::set<std::string> seen;
  for (auto& c : conv.categories)
    if (seen.insert(c.pattern.str()).second) kept.push_back(std::move(c));
  s.counts["records"] = records.size();
  s.counts["categories"] = kept.size();
  s.counts["duplicates"] = conv.categories.size() - kept.size();
  s.counts["skipped"] = conv.skipped.size();
  write_output(o.kb_path(), aiml::serialize_knowledge(kept));
}

}  // namespace

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::crawl: return "crawl";
    case Stage::clean: return "clean";
    case Stage::annotate: return "annotate";
    case Stage::convert: return "convert";
    case Stage::all: return "all";
  }
  return "all";
}

std::optional<Stage> parse_stage(std::string_view s) {
  for (auto st : {Stage::crawl, Stage::clean, Stage::annotate, Stage::convert, Stage::all})
    if (to_string(st) == s) return st;
  return std::nullopt;
}

bool PipelineRun::ok() const {
  return std::all_of(stages.begin(), stages.end(), [](const auto& s) { return s.errors.empty(); });
}

std::string PipelineRun::text() const {
  std::string out;
  for (const auto& s : stages) {
    out += std::string(to_string(s.stage)) + ":";
    for (const auto& [k, v] : s.counts) out += " " + k + "=" + std::to_string(v);
    for (const auto& e : s.errors) out += "\n  error: " + e;
    out += "\n";
  }
  return out;
}

std::string PipelineRun::json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : stages) arr.push_back({{"stage", to_string(s.stage)}, {"counts", s.counts}, {"errors", s.errors}});
  return nlohmann::json{{"ok", ok()}, {"stages", arr}}.dump();
}

bool write_if_changed(const std::filesystem::path& file, std::string_view bytes) {
  {
    std::ifstream in(file, std::ios::binary);
    if (in) {
      std::ostringstream ss;
      ss << in.rdbuf();
      if (ss.str() == bytes) return false;
    }
  }
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, file, ec);
  if (ec) throw std::runtime_error("cannot replace " + file.string() + ": " + ec.message());
  return true;
}

PipelineRun run(Stage stage, const Options& options) {
  auto resources = load_resources(stage, options);
  PipelineRun out;
  std::error_code ec;
  std::filesystem::create_directories(options.out, ec);
  for (auto part : kOrder) {
    if (!needs(stage, part)) continue;
    StageSummary s{part, {}, {}};
    if (ec) {
      s.errors.push_back("cannot create " + options.out.string() + ": " + ec.message());
    } else {
      try {
        switch (part) {
          case Stage::crawl: run_crawl(options, resources, s); break;
          case Stage::clean: run_clean(options, resources, s); break;
          case Stage::annotate: run_annotate(options, resources, s); break;
          case Stage::convert: run_convert(options, resources, s); break;
          case Stage::all: break;
        }
      } catch (const StageFailed& e) {
        s.errors.push_back(e.what());
      }
    }
    out.stages.push_back(std::move(s));
    if (!out.stages.back().errors.empty()) break;
  }
  return out;
}

}  // namespace ccnet::pipeline
