#include "ccnet/alertnews/alertnews.hpp"

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>

#include "ccnet/converter/converter.hpp"
#include "ccnet/url.hpp"

namespace ccnet::alertnews {

using json = nlohmann::json;

namespace {

bool valid_channel(std::string_view c) {
  if (c.empty() || c.size() > 64 || c.front() == '.') return false;
  return std::all_of(c.begin(), c.end(), [](char ch) {
    return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '_' ||
           ch == '-' || ch == '.';
  });
}

std::vector<std::string> normalize_topics(std::vector<std::string> topics) {
  std::vector<std::string> out;
  for (const auto& t : topics) {
    auto n = text::to_lower_ascii(text::collapse_whitespace(t));
    if (!n.empty()) out.push_back(std::move(n));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string subscriber_id(std::string_view channel, const std::vector<std::string>& topics) {
  std::string key(channel);
  for (const auto& t : topics) key += '\x1f' + t;
  return "s" + text::to_hex(text::fnv1a64(key));
}

// Longest prefix within `limit` bytes ending on a UTF-8 boundary, marked "...".
std::string clip(std::string_view s, std::size_t limit) {
  if (s.size() <= limit) return std::string(s);
  if (limit < 3) return {};
  std::size_t n = limit - 3;
  while (n > 0 && (static_cast<unsigned char>(s[n]) & 0xC0) == 0x80) --n;
  return std::string(text::trim(s.substr(0, n))) + "...";
}

json subscriber_json(const Subscriber& s) {
  json j{{"id", s.id}, {"role", to_string(s.role)}, {"channel", s.channel}, {"topics", s.topics}, {"token", s.token}};
  if (s.webhook) j["webhook"] = *s.webhook;
  return j;
}

Subscriber subscriber_from(const json& j) {
  Subscriber s;
  s.id = j.at("id").get<std::string>();
  s.role = parse_role(j.at("role").get<std::string>());
  s.channel = j.at("channel").get<std::string>();
  s.topics = j.at("topics").get<std::vector<std::string>>();
  s.token = j.at("token").get<std::string>();
  if (j.contains("webhook")) s.webhook = j["webhook"].get<std::string>();
  return s;
}

}  // namespace

std::string_view to_string(Role r) { return r == Role::editorial ? "editorial" : "subscribed"; }

Role parse_role(std::string_view s) {
  if (s == "subscribed") return Role::subscribed;
  if (s == "editorial") return Role::editorial;
  throw AlertError("unknown role: " + std::string(s));
}

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::on_subscribe: return "on-subscribe";
    case Mode::on_demand: return "on-demand";
    case Mode::on_alert: return "on-alert";
  }
  return "on-subscribe";
}

Mode parse_mode(std::string_view s) {
  for (auto m : {Mode::on_subscribe, Mode::on_demand, Mode::on_alert})
    if (to_string(m) == s) return m;
  throw AlertError("unknown mode: " + std::string(s));
}

bool Subscriber::wants(const repository::NewsRecord& record) const {
  if (topics.empty()) return true;
  for (const auto& e : record.entities) {
    auto surface = text::to_lower_ascii(text::collapse_whitespace(e.surface));
    for (const auto& t : topics)
      if (t == surface || text::equals_icase(t, e.tag)) return true;
  }
  return false;
}

std::string AlertMessage::body() const {
  const std::size_t budget = kMaxBody > url.size() + 2 ? kMaxBody - url.size() - 2 : 0;
  std::string head = clip(title, budget);
  std::string clipped = head.size() + 1 < budget ? clip(excerpt, budget - head.size() - 1) : std::string();
  std::string out = head;
  if (!clipped.empty()) out += "\n" + clipped;
  return out + "\n" + url;
}

std::string AlertMessage::to_json() const {
  return json{{"to", to},
              {"record_id", record_id},
              {"revision", revision},
              {"title", title},
              {"excerpt", excerpt},
              {"url", url},
              {"mode", alertnews::to_string(mode)},
              {"created_at", text::format_timestamp(created_at)},
              {"body", body()}}
      .dump();
}

AlertMessage AlertMessage::from_json(std::string_view line) {
  auto j = json::parse(line);
  AlertMessage m;
  m.to = j.at("to").get<std::string>();
  m.record_id = j.at("record_id").get<std::string>();
  m.revision = j.at("revision").get<std::string>();
  m.title = j.at("title").get<std::string>();
  m.excerpt = j.at("excerpt").get<std::string>();
  m.url = j.at("url").get<std::string>();
  m.mode = parse_mode(j.at("mode").get<std::string>());
  auto at = text::parse_timestamp(j.at("created_at").get<std::string>());
  if (!at) throw AlertError("bad created_at");
  m.created_at = *at;
  return m;
}

WebhookPoster http_webhook_poster() {
  return [](const std::string& target, const std::string& body) {
    auto url = Url::parse(target);
    std::string origin = url.scheme() + "://" + url.host();
    if (url.port()) origin += ":" + std::to_string(*url.port());
    httplib::Client client(origin);
    if (!client.is_valid()) throw AlertError("unsupported webhook scheme: " + url.scheme());
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(5, 0);
    auto res = client.Post(url.request_target(), body, "application/json");
    if (!res) throw AlertError("webhook unreachable: " + httplib::to_string(res.error()));
    if (res->status / 100 != 2) throw AlertError("webhook answered " + std::to_string(res->status));
  };
}

AlertNews::AlertNews(repository::Repository& repo, AlertConfig config) : repo_(repo), config_(std::move(config)) {
  if (!config_.clock) config_.clock = &system_clock_;
  if (!config_.poster) config_.poster = http_webhook_poster();
  std::error_code ec;
  std::filesystem::create_directories(config_.outbox_dir, ec);
  if (ec) throw AlertError("cannot create outbox directory " + config_.outbox_dir.string() + ": " + ec.message());
  load();
  worker_ = std::jthread([this](std::stop_token st) { run(st); });
}

AlertNews::~AlertNews() {
  worker_.request_stop();
  queue_cv_.notify_all();
}

void AlertNews::load() {
  if (config_.registry && std::filesystem::exists(*config_.registry)) {
    std::ifstream in(*config_.registry);
    try {
      auto j = json::parse(in);
      for (const auto& s : j.at("subscribers")) subs_.push_back(subscriber_from(s));
    } catch (const std::exception& e) {
      throw AlertError("bad subscriber registry " + config_.registry->string() + ": " + e.what());
    }
  }
  for (const auto& entry : std::filesystem::directory_iterator(config_.outbox_dir)) {
    if (entry.path().extension() != ".jsonl") continue;
    std::ifstream in(entry.path());
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (text::trim(line).empty()) continue;
      try {
        auto m = AlertMessage::from_json(line);
        sent_.emplace(m.to, m.record_id, m.revision, m.mode);
      } catch (const std::exception& e) {
        throw AlertError(entry.path().string() + ":" + std::to_string(n) + ": " + e.what());
      }
    }
  }
}

void AlertNews::persist_locked() const {
  if (!config_.registry) return;
  json arr = json::array();
  for (const auto& s : subs_) arr.push_back(subscriber_json(s));
  auto tmp = *config_.registry;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << json{{"subscribers", arr}}.dump(2) << "\n";
    if (!out.flush()) throw AlertError("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, *config_.registry, ec);
  if (ec) throw AlertError("cannot replace " + config_.registry->string() + ": " + ec.message());
}

Subscriber AlertNews::subscribe(Role role, std::vector<std::string> topics, std::string channel,
                                std::optional<std::string> webhook) {
  if (!valid_channel(channel)) throw AlertError("invalid channel name: " + channel);
  if (webhook && !Url::try_parse(*webhook)) throw AlertError("invalid webhook url: " + *webhook);
  Subscriber s;
  s.topics = normalize_topics(std::move(topics));
  s.id = subscriber_id(channel, s.topics);
  std::lock_guard lock(mu_);
  for (const auto& existing : subs_)
    if (existing.id == s.id) return existing;
  s.role = role;
  s.channel = std::move(channel);
  s.webhook = std::move(webhook);
  s.token = text::random_token();
  subs_.push_back(s);
  try {
    persist_locked();
  } catch (...) {
    subs_.pop_back();
    throw;
  }
  return s;
}

std::optional<Subscriber> AlertNews::by_token(std::string_view token) const {
  std::lock_guard lock(mu_);
  for (const auto& s : subs_)
    if (!token.empty() && s.token == token) return s;
  return std::nullopt;
}

std::vector<Subscriber> AlertNews::subscribers() const {
  std::lock_guard lock(mu_);
  return subs_;
}

std::size_t AlertNews::fan_out(const repository::NewsRecord& record, Mode mode) {
  const auto revision = record.revision();
  const auto clip = converter::excerpt(record.content);
  std::vector<std::pair<std::string, std::string>> hooks;
  std::size_t written = 0;
  {
    std::lock_guard lock(mu_);
    for (const auto& s : subs_) {
      if (!s.wants(record)) continue;
      Key key{s.id, record.id, revision, mode};
      if (sent_.count(key)) continue;
      AlertMessage m{s.id, record.id, revision, record.title, clip, record.url, mode, config_.clock->now()};
      auto line = m.to_json();
      std::ofstream out(config_.outbox_dir / (s.channel + ".jsonl"), std::ios::app);
      out << line << "\n";
      if (!out.flush()) throw AlertError("cannot append to outbox " + s.channel);
      sent_.insert(std::move(key));
      ++written;
      if (s.webhook) hooks.emplace_back(*s.webhook, std::move(line));
    }
  }
  for (const auto& [url, body] : hooks) {
    try {
      config_.poster(url, body);
    } catch (const std::exception& e) {
      spdlog::warn("alertnews: webhook {} failed: {}", url, e.what());
      std::lock_guard lock(mu_);
      ++webhook_failures_;
    }
  }
  return written;
}

std::size_t AlertNews::post_alert(std::string_view token, std::string_view record_id) {
  if (!by_token(token)) throw AuthorizationError("posting alerts requires a subscription");
  auto record = repo_.get(record_id);
  if (!record) throw UnknownRecord("unknown record: " + std::string(record_id));
  return fan_out(*record, Mode::on_alert);
}

std::size_t AlertNews::dispatch_on_insert(const repository::NewsRecord& record) {
  return fan_out(record, Mode::on_subscribe);
}

void AlertNews::attach() {
  repo_.on_change([this](const repository::NewsRecord& r, repository::InsertOutcome o) {
    if (o != repository::InsertOutcome::unchanged) enqueue(r);
  });
}

void AlertNews::enqueue(repository::NewsRecord record) {
  {
    std::lock_guard lock(queue_mu_);
    queue_.push_back(std::move(record));
  }
  queue_cv_.notify_one();
}

void AlertNews::drain() {
  std::unique_lock lock(queue_mu_);
  idle_cv_.wait(lock, [&] { return queue_.empty() && !busy_; });
}

void AlertNews::run(std::stop_token stop) {
  std::unique_lock lock(queue_mu_);
  for (;;) {
    queue_cv_.wait(lock, stop, [&] { return !queue_.empty(); });
    if (queue_.empty()) return;  // stop requested and nothing left
    auto record = std::move(queue_.front());
    queue_.pop_front();
    busy_ = true;
    lock.unlock();
    try {
      dispatch_on_insert(record);
    } catch (const std::exception& e) {
      spdlog::error("alertnews: dispatch of {} failed: {}", record.url, e.what());
    }
    lock.lock();
    busy_ = false;
    if (queue_.empty()) idle_cv_.notify_all();
  }
}

std::vector<repository::NewsRecord> AlertNews::latest(std::size_t limit) const { return repo_.latest(limit); }

std::vector<repository::NewsRecord> AlertNews::on_demand(std::string_view token, std::size_t limit) const {
  auto s = by_token(token);
  if (!s) throw AuthorizationError("on-demand news requires a subscription");
  std::vector<repository::NewsRecord> out;
  for (auto& r : repo_.query({})) {
    if (out.size() >= limit) break;
    if (s->wants(r)) out.push_back(std::move(r));
  }
  return out;
}

std::vector<AlertMessage> AlertNews::outbox(std::string_view channel) const {
  if (!valid_channel(channel)) throw AlertError("invalid channel name: " + std::string(channel));
  std::lock_guard lock(mu_);
  std::vector<AlertMessage> out;
  std::ifstream in(config_.outbox_dir / (std::string(channel) + ".jsonl"));
  std::string line;
  while (std::getline(in, line))
    if (!text::trim(line).empty()) out.push_back(AlertMessage::from_json(line));
  return out;
}

std::size_t AlertNews::delivered() const {
  std::lock_guard lock(mu_);
  return sent_.size();
}

std::size_t AlertNews::webhook_failures() const {
  std::lock_guard lock(mu_);
  return webhook_failures_;
}

}  // namespace ccnet::alertnews
