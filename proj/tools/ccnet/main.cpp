// ccnet: run the news pipeline, chat with the knowledge base, or serve the portal.
//
//   ccnet crawl|clean|annotate|convert|all [--config crawl.json] [--out DIR] ...
//   ccnet repl --kb kb.aiml [--kb more.aiml] [--emotions emotion.tsv]
//   ccnet serve --config service.json
//
// Exit codes: 0 success, 1 stage or load failure, 2 invalid configuration.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>
#include <unistd.h>

#include "ccnet/aiml/parser.hpp"
#include "ccnet/pipeline/pipeline.hpp"
#include "ccnet/service/service.hpp"

namespace fs = std::filesystem;
using namespace ccnet;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kBadConfig = 2;

fs::path default_data_dir() {
  if (const char* env = std::getenv("CCNET_DATA_DIR")) return env;
  if (fs::is_directory(CCNET_DEFAULT_DATA_DIR)) return CCNET_DEFAULT_DATA_DIR;
  return CCNET_SOURCE_DATA_DIR;
}

struct PipelineFlags {
  std::string config, gazetteer, ontology, rules, templates, repo, kb, mirror, timestamp, data;
  std::string out = ".";
  bool json = false;
};

void add_pipeline_flags(CLI::App& cmd, PipelineFlags& f) {
  cmd.add_option("--config", f.config, "crawl config (JSON)");
  cmd.add_option("--gazetteer", f.gazetteer, "gazetteer TSV");
  cmd.add_option("--ontology", f.ontology, "ontology JSON");
  cmd.add_option("--rules", f.rules, "chunker rules TSV");
  cmd.add_option("--templates", f.templates, "template bank XML");
  cmd.add_option("--repo", f.repo, "repository journal (default OUT/news.jsonl)");
  cmd.add_option("--kb", f.kb, "knowledge file to write (default OUT/kb.aiml)");
  cmd.add_option("--out", f.out, "directory for stage files");
  cmd.add_option("--mirror", f.mirror, "fetch from a local mirror tree instead of the network");
  cmd.add_option("--timestamp", f.timestamp, "pin fetched_at/ingested_at (ISO 8601, e.g. 2004-04-08T00:00:00Z)");
  cmd.add_option("--data", f.data, "directory holding the default resource files");
  cmd.add_flag("--json", f.json, "print the summary as JSON");
}

int run_pipeline(pipeline::Stage stage, const PipelineFlags& f) {
  const fs::path data = f.data.empty() ? default_data_dir() : fs::path(f.data);
  auto pick = [&](const std::string& flag, const char* file) { return flag.empty() ? data / file : fs::path(flag); };
  pipeline::Options o;
  if (!f.config.empty()) o.crawl_config = f.config;
  o.gazetteer = pick(f.gazetteer, "gazetteer.tsv");
  o.ontology = pick(f.ontology, "ontology.json");
  o.chunker_rules = pick(f.rules, "chunker_rules.tsv");
  o.templates = pick(f.templates, "templates.xml");
  o.out = f.out;
  if (!f.repo.empty()) o.repo = f.repo;
  if (!f.kb.empty()) o.kb = f.kb;
  if (!f.mirror.empty()) o.mirror = f.mirror;
  if (!f.timestamp.empty()) {
    auto t = text::parse_timestamp(f.timestamp);
    if (!t) {
      std::cerr << "ccnet: --timestamp must be ISO 8601 like 2004-04-08T00:00:00Z\n";
      return kBadConfig;
    }
    o.timestamp = *t;
  }
  try {
    auto result = pipeline::run(stage, o);
    std::cout << (f.json ? result.json() + "\n" : result.text());
    return result.ok() ? kOk : kFailed;
  } catch (const pipeline::ConfigError& e) {
    std::cerr << "ccnet: " << e.what() << "\n";
    return kBadConfig;
  }
}

struct ReplFlags {
  std::vector<std::string> kb;
  std::string emotions;
  std::string fallback = aiml::kDefaultFallbackText;
};

std::string annotate(const aiml::Response& r) {
  std::string out = r.text;
  if (r.cue) out += " [cue: " + r.cue->str() + "]";
  if (r.push) out += " [url: " + r.push->url() + "]";
  return out;
}

int run_repl(const ReplFlags& f) {
  aiml::KnowledgeBase kb;
  std::optional<aiml::EmotionLexicon> emotions;
  try {
    for (const auto& file : f.kb) {
      auto parsed = aiml::load_knowledge_file(file);
      for (const auto& d : parsed.diagnostics) spdlog::warn("{}:{}: {}", file, d.line, d.message);
      for (auto& c : parsed.categories) kb.insert(std::move(c));
    }
    if (!f.emotions.empty()) emotions = aiml::EmotionLexicon::load(f.emotions);
  } catch (const std::exception& e) {
    std::cerr << "ccnet: cannot load knowledge: " << e.what() << "\n";
    return kFailed;
  }
  service::ChatEngine engine(kb, aiml::TemplateBody::from_text(f.fallback), emotions ? &*emotions : nullptr);
  const bool interactive = isatty(STDIN_FILENO);
  std::string line;
  for (;;) {
    if (interactive) std::cout << "> " << std::flush;
    if (!std::getline(std::cin, line)) break;
    auto trimmed = text::trim(line);
    if (trimmed == ":quit") break;
    if (trimmed.empty()) continue;
    std::cout << annotate(engine.reply(trimmed)) << "\n";
  }
  return kOk;
}

int run_serve(const std::string& config) {
  std::optional<service::ServiceConfig> cfg;
  try {
    cfg = service::ServiceConfig::load(config);
  } catch (const std::exception& e) {
    std::cerr << "ccnet: " << e.what() << "\n";
    return kBadConfig;
  }
  try {
    service::Portal portal(*cfg);
    std::cerr << "ccnet: serving on " << cfg->host << ":" << cfg->port << "\n";
    portal.service().listen(cfg->host, cfg->port);
  } catch (const std::exception& e) {
    std::cerr << "ccnet: " << e.what() << "\n";
    return kFailed;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("ccnet");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);

  CLI::App app{"Crisis news pipeline and chat portal"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "log progress to stderr");

  PipelineFlags pf;
  std::vector<std::pair<CLI::App*, pipeline::Stage>> stages;
  for (auto stage : {pipeline::Stage::crawl, pipeline::Stage::clean, pipeline::Stage::annotate,
                     pipeline::Stage::convert, pipeline::Stage::all}) {
    auto* cmd = app.add_subcommand(std::string(pipeline::to_string(stage)), "run the " +
                                                                                std::string(pipeline::to_string(stage)) +
                                                                                " stage");
    add_pipeline_flags(*cmd, pf);
    stages.emplace_back(cmd, stage);
  }
  stages.back().first->description("crawl, clean, annotate and convert in order");

  ReplFlags rf;
  auto* repl = app.add_subcommand("repl", "chat with a knowledge base on stdin");
  repl->add_option("--kb", rf.kb, "AIML knowledge file (repeatable)")->required();
  repl->add_option("--emotions", rf.emotions, "emotion lexicon TSV");
  repl->add_option("--fallback", rf.fallback, "reply when nothing matches");

  std::string serve_config;
  auto* serve = app.add_subcommand("serve", "serve the HTTP portal");
  serve->add_option("--config", serve_config, "service config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadConfig;
  }
  if (verbose) spdlog::set_level(spdlog::level::info);

  for (const auto& [cmd, stage] : stages)
    if (cmd->parsed()) return run_pipeline(stage, pf);
  if (repl->parsed()) return run_repl(rf);
  if (serve->parsed()) return run_serve(serve_config);
  return kBadConfig;
}
