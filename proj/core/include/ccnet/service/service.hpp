#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ccnet/aiml/emotion.hpp"
#include "ccnet/aiml/knowledge_base.hpp"
#include "ccnet/aiml/render.hpp"
#include "ccnet/aiml/types.hpp"
#include "ccnet/alertnews/alertnews.hpp"
#include "ccnet/clock.hpp"
#include "ccnet/repository/repository.hpp"

namespace ccnet::service {

class ServiceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stateless question answering: normalize, match, render, and take the cue
/// from the emotion lexicon when the template gave none.
class ChatEngine {
 public:
  ChatEngine(const aiml::KnowledgeBase& kb, aiml::TemplateBody fallback, const aiml::EmotionLexicon* emotions = nullptr);
  aiml::Response reply(std::string_view user_text) const;

 private:
  const aiml::KnowledgeBase& kb_;
  aiml::TemplateBody fallback_;
  const aiml::EmotionLexicon* emotions_;
};

/// Cuts `text` to at most `limit` bytes on a UTF-8 boundary, marking the cut
/// with "...".
std::string truncate_utf8(std::string_view text, std::size_t limit);

struct ConversationLogEntry {
  std::string session_id;
  std::size_t turn = 0;  // 1-based, dense per session
  std::string user_text;
  std::string response_text;
  bool matched = false;
  std::optional<std::string> source_id;
  text::Timestamp timestamp;

  std::string to_json() const;
  static ConversationLogEntry from_json(std::string_view line);
  friend bool operator==(const ConversationLogEntry&, const ConversationLogEntry&) = default;
};

struct AccessLogEntry {
  std::string method;
  std::string path;
  int status = 0;
  long long duration_ms = 0;
  std::optional<std::string> session_id;
  text::Timestamp timestamp;

  std::string to_json() const;
  static AccessLogEntry from_json(std::string_view line);
  friend bool operator==(const AccessLogEntry&, const AccessLogEntry&) = default;
};

/// Append-only NDJSON file; one writer at a time. Failed writes are counted,
/// never thrown.
class JsonlLog {
 public:
  explicit JsonlLog(std::optional<std::filesystem::path> path);
  void append(const std::string& line);
  std::size_t failures() const { return failures_; }
  std::size_t lines() const { return lines_; }

 private:
  std::optional<std::filesystem::path> path_;
  std::mutex mu_;
  std::ofstream out_;
  std::atomic<std::size_t> failures_{0};
  std::atomic<std::size_t> lines_{0};
};

std::vector<std::string> read_lines(const std::filesystem::path& file);

struct ChatReply {
  std::string session_id;
  aiml::Response response;
  std::size_t turn = 0;
};

struct Components {
  aiml::KnowledgeBase& kb;
  repository::Repository& repo;
  alertnews::AlertNews& alerts;
  const aiml::EmotionLexicon* emotions = nullptr;
};

struct ServiceOptions {
  std::string fallback_text = aiml::kDefaultFallbackText;
  std::optional<std::filesystem::path> access_log;
  std::optional<std::filesystem::path> conversation_log;
  Clock* clock = nullptr;  // log stamps; system clock when null
  std::size_t mobile_limit = 480;
  std::size_t default_limit = 10;
};

/// The portal. The JSON endpoints are
///
///   POST /chat {session_id?, text, mobile?} -> {session_id, text, cue?, push_url?, matched}
///   GET  /news?limit&tag&surface&from&to    -> {news: [summary]}
///   GET  /news/{id}/tips?limit              -> {tips: [summary]}
///   POST /subscribe {role?, topics, channel, webhook?} -> subscriber with token
///   POST /alerts {token, record_id}         -> {fan_out}
///   GET  /alerts/latest?limit&token         -> {news: [summary]}
///
/// Every request gets one access-log line; every chat turn one
/// conversation-log line. Unknown or absent session ids start a new session.
class Service {
 public:
  Service(Components components, ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Throws ServiceError for blank text; nothing is logged then.
  ChatReply chat(std::optional<std::string> session_id, std::string_view text, bool mobile = false);

  /// Binds and serves on a background thread; port 0 picks a free port.
  /// Returns the bound port.
  int start(const std::string& host, int port);
  /// Blocks serving on the calling thread.
  void listen(const std::string& host, int port);
  void stop();

  std::size_t sessions() const;
  std::size_t access_log_failures() const { return access_log_.failures(); }
  std::size_t conversation_log_failures() const { return conversation_log_.failures(); }
  const ChatEngine& engine() const { return engine_; }

 private:
  struct Http;

  Components c_;
  ServiceOptions options_;
  SystemClock system_clock_;
  Clock* clock_;
  ChatEngine engine_;
  JsonlLog access_log_;
  JsonlLog conversation_log_;

  mutable std::mutex sessions_mu_;  // also orders conversation-log lines per session
  struct Session {
    text::Timestamp started_at;
    std::size_t turns = 0;
  };
  std::map<std::string, Session, std::less<>> sessions_;

  std::unique_ptr<Http> http_;
};

/// Replays a conversation log against `engine`; returns the entries whose
/// recorded response text differs from the engine's answer now.
std::vector<ConversationLogEntry> replay(const std::vector<ConversationLogEntry>& log, const ChatEngine& engine);

/// Service config file:
///
///   {"host": "127.0.0.1", "port": 8080, "data_dir": "var",
///    "knowledge": ["greetings.aiml", "kb.aiml"], "repository": "news.jsonl",
///    "emotions": "emotion.tsv", "fallback_text": "...",
///    "access_log": "access.jsonl", "conversation_log": "conversation.jsonl",
///    "outbox_dir": "outbox", "subscribers": "subscribers.json"}
///
/// data_dir is relative to the config file, every other path to data_dir.
struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir;
  std::vector<std::filesystem::path> knowledge;
  std::filesystem::path repository;
  std::optional<std::filesystem::path> emotions;
  std::string fallback_text = aiml::kDefaultFallbackText;
  std::filesystem::path access_log;
  std::filesystem::path conversation_log;
  std::filesystem::path outbox_dir;
  std::filesystem::path subscribers;

  /// Throws ServiceError naming the offending field.
  static ServiceConfig from_json(std::string_view json, const std::filesystem::path& base_dir);
  static ServiceConfig load(const std::filesystem::path& file);
};

/// Everything a running portal owns, built from a config.
class Portal {
 public:
  explicit Portal(const ServiceConfig& config);
  Service& service() { return *service_; }
  aiml::KnowledgeBase& kb() { return kb_; }
  repository::Repository& repo() { return *repo_; }
  alertnews::AlertNews& alerts() { return *alerts_; }

 private:
  aiml::KnowledgeBase kb_;
  std::optional<aiml::EmotionLexicon> emotions_;
  std::unique_ptr<repository::Repository> repo_;
  std::unique_ptr<alertnews::AlertNews> alerts_;
  std::unique_ptr<Service> service_;
};

}  // namespace ccnet::service
