#include "ccnet/service/service.hpp"

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <charconv>
#include <sstream>
#include <thread>

#include "ccnet/aiml/normalize.hpp"
#include "ccnet/aiml/parser.hpp"
#include "ccnet/aiml/render.hpp"
#include "ccnet/converter/converter.hpp"

namespace ccnet::service {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Chat engine

ChatEngine::ChatEngine(const aiml::KnowledgeBase& kb, aiml::TemplateBody fallback, const aiml::EmotionLexicon* emotions)
    : kb_(kb), fallback_(std::move(fallback)), emotions_(emotions) {}

aiml::Response ChatEngine::reply(std::string_view user_text) const {
  auto tokens = aiml::normalize(user_text);
  auto response = aiml::render(kb_.match(tokens), fallback_);
  if (!response.cue && emotions_) response.cue = emotions_->classify(user_text);
  return response;
}

std::string truncate_utf8(std::string_view s, std::size_t limit) {
  if (s.size() <= limit) return std::string(s);
  if (limit < 3) return {};
  std::size_t n = limit - 3;
  while (n > 0 && (static_cast<unsigned char>(s[n]) & 0xC0) == 0x80) --n;
  return std::string(text::trim(s.substr(0, n))) + "...";
}

// ---------------------------------------------------------------------------
// Logs

namespace {

text::Timestamp stamp_of(const json& j, const char* key) {
  auto t = text::parse_timestamp(j.at(key).get<std::string>());
  if (!t) throw ServiceError(std::string("bad ") + key);
  return *t;
}

}  // namespace

std::string ConversationLogEntry::to_json() const {
  json j{{"session_id", session_id}, {"turn", turn},       {"user_text", user_text},
         {"response_text", response_text}, {"matched", matched}, {"timestamp", text::format_timestamp(timestamp)}};
  if (source_id) j["source_id"] = *source_id;
  return j.dump();
}

ConversationLogEntry ConversationLogEntry::from_json(std::string_view line) {
  auto j = json::parse(line);
  ConversationLogEntry e;
  e.session_id = j.at("session_id").get<std::string>();
  e.turn = j.at("turn").get<std::size_t>();
  e.user_text = j.at("user_text").get<std::string>();
  e.response_text = j.at("response_text").get<std::string>();
  e.matched = j.at("matched").get<bool>();
  if (j.contains("source_id")) e.source_id = j["source_id"].get<std::string>();
  e.timestamp = stamp_of(j, "timestamp");
  return e;
}

std::string AccessLogEntry::to_json() const {
  json j{{"method", method}, {"path", path}, {"status", status}, {"duration_ms", duration_ms},
         {"timestamp", text::format_timestamp(timestamp)}};
  if (session_id) j["session_id"] = *session_id;
  return j.dump();
}

AccessLogEntry AccessLogEntry::from_json(std::string_view line) {
  auto j = json::parse(line);
  AccessLogEntry e;
  e.method = j.at("method").get<std::string>();
  e.path = j.at("path").get<std::string>();
  e.status = j.at("status").get<int>();
  e.duration_ms = j.at("duration_ms").get<long long>();
  if (j.contains("session_id")) e.session_id = j["session_id"].get<std::string>();
  e.timestamp = stamp_of(j, "timestamp");
  return e;
}

JsonlLog::JsonlLog(std::optional<std::filesystem::path> path) : path_(std::move(path)) {
  if (path_) out_.open(*path_, std::ios::app);
}

void JsonlLog::append(const std::string& line) {
  if (!path_) return;
  std::lock_guard lock(mu_);
  if (!out_.is_open()) out_.open(*path_, std::ios::app);  // retry after an earlier failure
  out_ << line << '\n';
  out_.flush();
  if (!out_) {
    ++failures_;
    out_.close();
    out_.clear();
    return;
  }
  ++lines_;
}

std::vector<std::string> read_lines(const std::filesystem::path& file) {
  std::vector<std::string> out;
  std::ifstream in(file);
  std::string line;
  while (std::getline(in, line))
    if (!text::trim(line).empty()) out.push_back(line);
  return out;
}

std::vector<ConversationLogEntry> replay(const std::vector<ConversationLogEntry>& log, const ChatEngine& engine) {
  std::vector<ConversationLogEntry> out;
  for (const auto& e : log)
    if (engine.reply(e.user_text).text != e.response_text) out.push_back(e);
  return out;
}

// ---------------------------------------------------------------------------
// Service

namespace {

json summary(const repository::NewsRecord& r) {
  return {{"id", r.id},
          {"url", r.url},
          {"date", text::format_iso_date(r.date)},
          {"title", r.title},
          {"excerpt", converter::excerpt(r.content)}};
}

json summaries(const std::vector<repository::NewsRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) arr.push_back(summary(r));
  return arr;
}

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, int status, std::string_view message) {
  send(res, status, json{{"error", message}});
}

std::optional<std::size_t> limit_param(const httplib::Request& req, std::size_t fallback) {
  if (!req.has_param("limit")) return fallback;
  const auto v = req.get_param_value("limit");
  std::size_t n = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
  if (ec != std::errc{} || p != v.data() + v.size() || n == 0 || n > 1000) return std::nullopt;
  return n;
}

json parse_body(const httplib::Request& req) {
  auto j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ServiceError("request body must be a JSON object");
  return j;
}

thread_local std::chrono::steady_clock::time_point request_started;

}  // namespace

struct Service::Http {
  httplib::Server server;
  std::thread thread;
};

Service::Service(Components components, ServiceOptions options)
    : c_(components),
      options_(std::move(options)),
      clock_(options_.clock ? options_.clock : &system_clock_),
      engine_(c_.kb, aiml::TemplateBody::from_text(options_.fallback_text), c_.emotions),
      access_log_(options_.access_log),
      conversation_log_(options_.conversation_log),
      http_(std::make_unique<Http>()) {
  auto& svr = http_->server;

  svr.set_pre_routing_handler([](const httplib::Request&, httplib::Response& res) {
    request_started = std::chrono::steady_clock::now();
    res.set_header("Access-Control-Allow-Origin", "*");
    return httplib::Server::HandlerResponse::Unhandled;
  });
  // Runs before the response bytes go out, so lines follow arrival order for
  // clients that wait for each answer.
  svr.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    AccessLogEntry e;
    e.method = req.method;
    e.path = req.path;
    e.status = res.status;
    e.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                          request_started)
                        .count();
    if (res.has_header("X-Session-Id")) e.session_id = res.get_header_value("X-Session-Id");
    e.timestamp = clock_->now();
    access_log_.append(e.to_json());
  });
  svr.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      spdlog::error("service: {}", e.what());
    } catch (...) {
    }
    fail(res, 500, "internal error");
  });

  svr.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  svr.Post("/chat", [this](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = parse_body(req);
    } catch (const ServiceError& e) {
      return fail(res, 400, e.what());
    }
    if (!body.contains("text") || !body["text"].is_string()) return fail(res, 400, "text is required");
    std::optional<std::string> sid;
    if (body.contains("session_id") && body["session_id"].is_string()) sid = body["session_id"].get<std::string>();
    bool mobile = body.contains("mobile") && body["mobile"].is_boolean() && body["mobile"].get<bool>();
    ChatReply reply;
    try {
      reply = chat(sid, body["text"].get<std::string>(), mobile);
    } catch (const ServiceError& e) {
      return fail(res, 400, e.what());
    }
    json out{{"session_id", reply.session_id}, {"text", reply.response.text}, {"matched", reply.response.matched}};
    if (reply.response.cue) out["cue"] = reply.response.cue->anims();
    if (reply.response.push) out["push_url"] = reply.response.push->url();
    res.set_header("X-Session-Id", reply.session_id);
    send(res, 200, out);
  });

  svr.Get("/news", [this](const httplib::Request& req, httplib::Response& res) {
    auto limit = limit_param(req, options_.default_limit);
    if (!limit) return fail(res, 400, "limit must be 1..1000");
    repository::Filter f;
    if (req.has_param("tag")) f.tag = req.get_param_value("tag");
    if (req.has_param("surface")) f.surface = req.get_param_value("surface");
    for (auto [key, slot] : {std::pair{"from", &f.from}, std::pair{"to", &f.to}}) {
      if (!req.has_param(key)) continue;
      auto d = text::parse_iso_date(req.get_param_value(key));
      if (!d) return fail(res, 400, std::string(key) + " must be YYYY-MM-DD");
      *slot = *d;
    }
    auto records = c_.repo.query(f);
    if (records.size() > *limit) records.resize(*limit);
    send(res, 200, json{{"news", summaries(records)}});
  });

  svr.Get("/news/:id/tips", [this](const httplib::Request& req, httplib::Response& res) {
    auto limit = limit_param(req, options_.default_limit);
    if (!limit) return fail(res, 400, "limit must be 1..1000");
    const auto& id = req.path_params.at("id");
    if (!c_.repo.get(id)) return fail(res, 404, "unknown record");
    send(res, 200, json{{"tips", summaries(c_.repo.related(id, *limit))}});
  });

  svr.Post("/subscribe", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      auto body = parse_body(req);
      auto role = alertnews::parse_role(body.value("role", std::string("subscribed")));
      std::vector<std::string> topics;
      if (body.contains("topics")) topics = body["topics"].get<std::vector<std::string>>();
      if (!body.contains("channel") || !body["channel"].is_string()) return fail(res, 400, "channel is required");
      std::optional<std::string> hook;
      if (body.contains("webhook") && body["webhook"].is_string()) hook = body["webhook"].get<std::string>();
      auto s = c_.alerts.subscribe(role, std::move(topics), body["channel"].get<std::string>(), hook);
      json out{{"id", s.id}, {"role", alertnews::to_string(s.role)}, {"channel", s.channel},
               {"topics", s.topics}, {"token", s.token}};
      if (s.webhook) out["webhook"] = *s.webhook;
      send(res, 200, out);
    } catch (const json::exception& e) {
      fail(res, 400, e.what());
    } catch (const std::runtime_error& e) {
      fail(res, 400, e.what());
    }
  });

  svr.Post("/alerts", [this](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = parse_body(req);
    } catch (const ServiceError& e) {
      return fail(res, 400, e.what());
    }
    if (!body.contains("record_id") || !body["record_id"].is_string()) return fail(res, 400, "record_id is required");
    auto token = body.contains("token") && body["token"].is_string() ? body["token"].get<std::string>() : "";
    try {
      auto n = c_.alerts.post_alert(token, body["record_id"].get<std::string>());
      send(res, 200, json{{"fan_out", n}});
    } catch (const alertnews::AuthorizationError& e) {
      fail(res, 403, e.what());
    } catch (const alertnews::UnknownRecord& e) {
      fail(res, 404, e.what());
    }
  });

  svr.Get("/alerts/latest", [this](const httplib::Request& req, httplib::Response& res) {
    auto limit = limit_param(req, options_.default_limit);
    if (!limit) return fail(res, 400, "limit must be 1..1000");
    if (!req.has_param("token")) return send(res, 200, json{{"news", summaries(c_.alerts.latest(*limit))}});
    try {
      send(res, 200, json{{"news", summaries(c_.alerts.on_demand(req.get_param_value("token"), *limit))}});
    } catch (const alertnews::AuthorizationError& e) {
      fail(res, 403, e.what());
    }
  });
}

Service::~Service() { stop(); }

ChatReply Service::chat(std::optional<std::string> session_id, std::string_view user_text, bool mobile) {
  if (text::trim(user_text).empty()) throw ServiceError("text must not be empty");
  auto response = engine_.reply(user_text);
  if (mobile) response.text = truncate_utf8(response.text, options_.mobile_limit);

  std::lock_guard lock(sessions_mu_);
  auto now = clock_->now();
  std::string id;
  if (session_id && sessions_.count(*session_id)) {
    id = *session_id;
  } else {
    do id = text::random_token();
    while (sessions_.count(id));
    sessions_.emplace(id, Session{now, 0});
  }
  auto& session = sessions_.find(id)->second;
  ChatReply reply{id, std::move(response), ++session.turns};
  ConversationLogEntry e{id, reply.turn, std::string(user_text), reply.response.text, reply.response.matched,
                         reply.response.source_id, now};
  conversation_log_.append(e.to_json());
  return reply;
}

std::size_t Service::sessions() const {
  std::lock_guard lock(sessions_mu_);
  return sessions_.size();
}

int Service::start(const std::string& host, int port) {
  auto& svr = http_->server;
  int bound = port == 0 ? svr.bind_to_any_port(host) : (svr.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw ServiceError("cannot bind " + host + ":" + std::to_string(port));
  http_->thread = std::thread([&svr] { svr.listen_after_bind(); });
  svr.wait_until_ready();
  return bound;
}

void Service::listen(const std::string& host, int port) {
  if (!http_->server.listen(host, port)) throw ServiceError("cannot listen on " + host + ":" + std::to_string(port));
}

void Service::stop() {
  if (!http_) return;
  http_->server.stop();
  if (http_->thread.joinable()) http_->thread.join();
}

// ---------------------------------------------------------------------------
// Config and portal

ServiceConfig ServiceConfig::from_json(std::string_view text, const std::filesystem::path& base_dir) {
  auto j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ServiceError("service config must be a JSON object");
  ServiceConfig c;
  auto str = [&](const char* key) -> std::optional<std::string> {
    if (!j.contains(key)) return std::nullopt;
    if (!j[key].is_string()) throw ServiceError(std::string(key) + " must be a string");
    return j[key].get<std::string>();
  };
  if (auto h = str("host")) c.host = *h;
  if (j.contains("port")) {
    if (!j["port"].is_number_integer()) throw ServiceError("port must be an integer");
    c.port = j["port"].get<int>();
    if (c.port < 0 || c.port > 65535) throw ServiceError("port must be 0..65535");
  }
  c.data_dir = base_dir / str("data_dir").value_or(".");
  auto under = [&](const std::string& p) { return c.data_dir / p; };
  if (!j.contains("knowledge") || !j["knowledge"].is_array()) throw ServiceError("knowledge must be a list of files");
  for (const auto& k : j["knowledge"]) {
    if (!k.is_string()) throw ServiceError("knowledge entries must be strings");
    c.knowledge.push_back(under(k.get<std::string>()));
  }
  c.repository = under(str("repository").value_or("news.jsonl"));
  if (auto e = str("emotions")) c.emotions = under(*e);
  if (auto f = str("fallback_text")) c.fallback_text = *f;
  if (text::trim(c.fallback_text).empty()) throw ServiceError("fallback_text must not be empty");
  c.access_log = under(str("access_log").value_or("access.jsonl"));
  c.conversation_log = under(str("conversation_log").value_or("conversation.jsonl"));
  c.outbox_dir = under(str("outbox_dir").value_or("outbox"));
  c.subscribers = under(str("subscribers").value_or("subscribers.json"));
  return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ServiceError("cannot read service config " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str(), file.parent_path());
}

Portal::Portal(const ServiceConfig& config) {
  for (const auto& file : config.knowledge) {
    auto parsed = aiml::load_knowledge_file(file);
    for (const auto& d : parsed.diagnostics) spdlog::warn("{}:{}: {}", file.string(), d.line, d.message);
    for (auto& c : parsed.categories) kb_.insert(std::move(c));
  }
  if (config.emotions) emotions_ = aiml::EmotionLexicon::load(*config.emotions);
  repo_ = std::make_unique<repository::Repository>(config.repository);
  alerts_ = std::make_unique<alertnews::AlertNews>(*repo_, alertnews::AlertConfig{config.outbox_dir, config.subscribers});
  alerts_->attach();
  ServiceOptions opts;
  opts.fallback_text = config.fallback_text;
  opts.access_log = config.access_log;
  opts.conversation_log = config.conversation_log;
  service_ = std::make_unique<Service>(Components{kb_, *repo_, *alerts_, emotions_ ? &*emotions_ : nullptr}, opts);
}

}  // namespace ccnet::service
