#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include "ccnet/clock.hpp"
#include "ccnet/repository/repository.hpp"

namespace ccnet::alertnews {

class AlertError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The caller holds no subscription (a non-subscribed user).
class AuthorizationError : public AlertError {
 public:
  using AlertError::AlertError;
};

class UnknownRecord : public AlertError {
 public:
  using AlertError::AlertError;
};

enum class Role { subscribed, editorial };
std::string_view to_string(Role r);
Role parse_role(std::string_view s);  // throws AlertError

enum class Mode { on_subscribe, on_demand, on_alert };
std::string_view to_string(Mode m);  // "on-subscribe" ...
Mode parse_mode(std::string_view s);

struct Subscriber {
  std::string id;  // function of channel and topics
  Role role = Role::subscribed;
  std::string channel;              // outbox file stem: [A-Za-z0-9_-][A-Za-z0-9_.-]*
  std::vector<std::string> topics;  // lower-cased, sorted, unique; empty = everything
  std::optional<std::string> webhook;
  std::string token;  // 128-bit secret that authorizes posting

  /// Topic equals an entity surface or tag (case-insensitive), or no topics.
  bool wants(const repository::NewsRecord& record) const;
  friend bool operator==(const Subscriber&, const Subscriber&) = default;
};

struct AlertMessage {
  std::string to;  // subscriber id
  std::string record_id;
  std::string revision;  // record revision the message was built from
  std::string title;
  std::string excerpt;
  std::string url;
  Mode mode = Mode::on_subscribe;
  text::Timestamp created_at;

  /// SMS-style body, title / excerpt / url on separate lines, at most
  /// kMaxBody bytes. The url is never cut; title and excerpt shrink on UTF-8
  /// boundaries with a trailing "...".
  std::string body() const;
  std::string to_json() const;  // one outbox line, includes "body"
  static AlertMessage from_json(std::string_view line);
  friend bool operator==(const AlertMessage&, const AlertMessage&) = default;
};

inline constexpr std::size_t kMaxBody = 480;

/// Delivers one message to a webhook; throwing marks the delivery failed.
using WebhookPoster = std::function<void(const std::string& url, const std::string& json)>;
WebhookPoster http_webhook_poster();

struct AlertConfig {
  std::filesystem::path outbox_dir;               // <channel>.jsonl per channel
  std::optional<std::filesystem::path> registry;  // subscribers JSON; memory only when absent
  Clock* clock = nullptr;                         // message stamps; system clock when null
  WebhookPoster poster;                           // http_webhook_poster() when empty
};

/// Subscriptions and dispatch. Messages are deduplicated on (subscriber,
/// record, revision, mode); the set is rebuilt from the outboxes on open, so
/// a restart never repeats a delivery. Outbox appends happen under one lock.
/// Insert events from the repository go through a FIFO queue drained by one
/// worker thread.
class AlertNews {
 public:
  AlertNews(repository::Repository& repo, AlertConfig config);
  ~AlertNews();
  AlertNews(const AlertNews&) = delete;
  AlertNews& operator=(const AlertNews&) = delete;

  /// Same channel and topics return the stored subscriber unchanged.
  Subscriber subscribe(Role role, std::vector<std::string> topics, std::string channel,
                       std::optional<std::string> webhook = std::nullopt);
  std::optional<Subscriber> by_token(std::string_view token) const;
  std::vector<Subscriber> subscribers() const;

  /// On-alert fan-out by the subscriber holding `token`; returns messages
  /// written. Throws AuthorizationError or UnknownRecord.
  std::size_t post_alert(std::string_view token, std::string_view record_id);

  /// On-subscribe fan-out for a new or changed record; returns messages written.
  std::size_t dispatch_on_insert(const repository::NewsRecord& record);

  /// Registers a repository hook feeding the queue. Call once; the
  /// repository must stop inserting before this object is destroyed.
  void attach();
  void enqueue(repository::NewsRecord record);
  /// Blocks until every queued record has been dispatched.
  void drain();

  /// Public: the newest records, no subscription needed.
  std::vector<repository::NewsRecord> latest(std::size_t limit) const;
  /// Pull form of the subscriber's feed: newest records it wants.
  std::vector<repository::NewsRecord> on_demand(std::string_view token, std::size_t limit) const;

  std::vector<AlertMessage> outbox(std::string_view channel) const;
  std::size_t delivered() const;
  std::size_t webhook_failures() const;

 private:
  using Key = std::tuple<std::string, std::string, std::string, Mode>;

  std::size_t fan_out(const repository::NewsRecord& record, Mode mode);
  void persist_locked() const;
  void load();
  void run(std::stop_token stop);

  repository::Repository& repo_;
  AlertConfig config_;
  SystemClock system_clock_;

  mutable std::mutex mu_;  // subscribers, dedup set, outbox files
  std::vector<Subscriber> subs_;
  std::set<Key> sent_;
  std::size_t webhook_failures_ = 0;

  std::mutex queue_mu_;
  std::condition_variable_any queue_cv_;
  std::condition_variable idle_cv_;
  std::deque<repository::NewsRecord> queue_;
  bool busy_ = false;
  std::jthread worker_;
};

}  // namespace ccnet::alertnews
