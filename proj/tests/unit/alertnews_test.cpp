#include <doctest.h>

#include <json.hpp>

#include <set>
#include <thread>

#include "ccnet/alertnews/alertnews.hpp"
#include "ccnet/converter/converter.hpp"
#include "paths.hpp"
#include "records.hpp"

using namespace ccnet;
using namespace ccnet::alertnews;
using testing::make_record;
using testing::who_record;
using testing::ymd;

namespace {

struct Fixture {
  explicit Fixture(const std::string& name) : dir(name) {}
  AlertConfig config() {
    return {dir / "outbox", dir / "subscribers.json", &clock,
            [this](const std::string& url, const std::string& body) {
              std::lock_guard lock(mu);
              posted.emplace_back(url, body);
              if (url.find("fail") != std::string::npos) throw AlertError("refused");
            }};
  }
  testing::ScratchDir dir;
  PinnedClock clock{testing::at_ms(1081382400000)};
  repository::Repository repo;
  std::mutex mu;
  std::vector<std::pair<std::string, std::string>> posted;
};

}  // namespace

TEST_CASE("subscribe is idempotent per channel and topics and persists") {
  Fixture f("alert_sub");
  std::string token;
  {
    AlertNews an(f.repo, f.config());
    auto a = an.subscribe(Role::subscribed, {"meningitis"}, "outbox-a");
    auto again = an.subscribe(Role::subscribed, {" Meningitis ", "meningitis"}, "outbox-a");
    CHECK(a == again);
    CHECK(a.token.size() == 32);
    CHECK(a.topics == std::vector<std::string>{"meningitis"});
    auto other = an.subscribe(Role::subscribed, {"cholera"}, "outbox-a");
    CHECK(other.id != a.id);
    CHECK(other.token != a.token);
    CHECK(an.subscribers().size() == 2);
    CHECK_THROWS_AS(an.subscribe(Role::subscribed, {}, "../etc"), AlertError);
    CHECK_THROWS_AS(an.subscribe(Role::subscribed, {}, ""), AlertError);
    CHECK_THROWS_AS(an.subscribe(Role::subscribed, {}, "x", "not a url"), AlertError);
    CHECK_THROWS_AS(parse_role("anonymous"), AlertError);
    token = a.token;
  }
  AlertNews reopened(f.repo, f.config());
  CHECK(reopened.subscribers().size() == 2);
  REQUIRE(reopened.by_token(token));
  CHECK(reopened.by_token(token)->channel == "outbox-a");
  CHECK_FALSE(reopened.by_token(""));
  CHECK_FALSE(reopened.by_token("0123"));
}

TEST_CASE("post_alert fans out by topic and gates on role") {
  Fixture f("alert_post");
  f.repo.insert(who_record());
  AlertNews an(f.repo, f.config());
  auto men = an.subscribe(Role::subscribed, {"meningitis"}, "a");
  an.subscribe(Role::subscribed, {"influenza"}, "b");
  CHECK(an.post_alert(men.token, who_record().id) == 1);
  CHECK(an.post_alert(men.token, who_record().id) == 0);  // at most once per mode

  auto msgs = an.outbox("a");
  REQUIRE(msgs.size() == 1);
  CHECK(msgs[0].mode == Mode::on_alert);
  CHECK(msgs[0].to == men.id);
  CHECK(msgs[0].url == testing::kWhoUrl);
  CHECK(msgs[0].title == testing::kWhoTitle);
  CHECK(msgs[0].excerpt == converter::excerpt(testing::kWhoContent));
  CHECK(f.repo.get(msgs[0].record_id));
  CHECK(an.outbox("b").empty());

  auto ed = an.subscribe(Role::editorial, {}, "editorial");
  CHECK(an.post_alert(ed.token, who_record().id) == 1);  // only the editorial is new
  CHECK(an.outbox("editorial").size() == 1);

  CHECK_THROWS_AS(an.post_alert("not-a-token", who_record().id), AuthorizationError);
  CHECK_THROWS_AS(an.post_alert("", who_record().id), AuthorizationError);
  CHECK_THROWS_AS(an.post_alert(men.token, "0000000000000000"), UnknownRecord);
  CHECK_THROWS_AS(an.on_demand("nope", 5), AuthorizationError);
}

TEST_CASE("no subscribers means no messages") {
  Fixture f("alert_none");
  f.repo.insert(who_record());
  AlertNews an(f.repo, f.config());
  CHECK(an.dispatch_on_insert(who_record()) == 0);
  CHECK(an.delivered() == 0);
}

TEST_CASE("insert events dispatch through the queue") {
  Fixture f("alert_insert");
  AlertNews an(f.repo, f.config());
  an.attach();
  auto s = an.subscribe(Role::subscribed, {"burkina faso"}, "bf");
  an.subscribe(Role::subscribed, {"country"}, "tags", "http://hooks.example/ok");

  f.repo.insert(who_record());
  an.drain();
  CHECK(an.outbox("bf").size() == 1);
  CHECK(an.outbox("tags").size() == 1);
  CHECK(an.outbox("bf")[0].mode == Mode::on_subscribe);

  f.repo.insert(who_record());  // unchanged
  an.drain();
  CHECK(an.outbox("bf").size() == 1);

  auto edited = who_record();
  edited.content = "Meningitis re-emerged in Burkina Faso. Partners responded. More follows.";
  f.repo.insert(edited);
  an.drain();
  auto msgs = an.outbox("bf");
  REQUIRE(msgs.size() == 2);
  CHECK(msgs[1].excerpt == "Meningitis re-emerged in Burkina Faso. Partners responded...");
  CHECK(msgs[1].revision != msgs[0].revision);

  {
    std::lock_guard lock(f.mu);
    REQUIRE(f.posted.size() == 2);
    CHECK(f.posted[0].first == "http://hooks.example/ok");
    auto j = nlohmann::json::parse(f.posted[0].second);
    CHECK(j["url"] == testing::kWhoUrl);
    CHECK(j["mode"] == "on-subscribe");
  }
  CHECK(an.on_demand(s.token, 5).size() == 1);
  CHECK(an.latest(10).size() == 1);
}

TEST_CASE("restart keeps deliveries at most once") {
  Fixture f("alert_restart");
  f.repo.insert(who_record());
  {
    AlertNews an(f.repo, f.config());
    an.subscribe(Role::editorial, {}, "e");
    CHECK(an.dispatch_on_insert(who_record()) == 1);
  }
  AlertNews an(f.repo, f.config());
  CHECK(an.delivered() == 1);
  CHECK(an.dispatch_on_insert(who_record()) == 0);
  CHECK(an.outbox("e").size() == 1);

  std::ofstream(f.dir / "outbox" / "bad.jsonl") << "{oops\n";
  CHECK_THROWS_AS(AlertNews(f.repo, f.config()), AlertError);
}

TEST_CASE("webhook failures are counted, delivery to the outbox stands") {
  Fixture f("alert_hook");
  f.repo.insert(who_record());
  AlertNews an(f.repo, f.config());
  an.subscribe(Role::subscribed, {}, "x", "http://hooks.example/fail");
  CHECK(an.dispatch_on_insert(who_record()) == 1);
  CHECK(an.webhook_failures() == 1);
  CHECK(an.outbox("x").size() == 1);
}

TEST_CASE("latest serves non-subscribers") {
  Fixture f("alert_latest");
  AlertNews an(f.repo, f.config());
  CHECK(an.latest(10).empty());
  f.repo.insert(who_record());
  CHECK(an.latest(10).size() == 1);
  f.repo.insert(make_record("http://x.example/new", ymd(2004, 5, 1), "c", {}));
  auto one = an.latest(1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].url == "http://x.example/new");
}

TEST_CASE("message body is SMS sized and lossless on the wire") {
  AlertMessage m{"s1", "r1", "v1", "Title", "Short excerpt.", "http://x.example/a", Mode::on_alert,
                 testing::at_ms(1081382400000)};
  CHECK(m.body() == "Title\nShort excerpt.\nhttp://x.example/a");
  CHECK(AlertMessage::from_json(m.to_json()) == m);

  m.title = std::string(300, 'T');
  std::string ex;
  for (int i = 0; i < 200; ++i) ex += "\xc3\xa9";  // é
  m.excerpt = ex;
  auto body = m.body();
  CHECK(body.size() <= kMaxBody);
  CHECK(body.ends_with("\nhttp://x.example/a"));
  CHECK(text::sanitize_utf8(body) == body);
  CHECK(body.find("...") != std::string::npos);
  CHECK_THROWS_AS(parse_mode("sometimes"), AlertError);
}

TEST_CASE("100 concurrent inserts against 10 subscribers") {
  Fixture f("alert_concurrent");
  AlertNews an(f.repo, f.config());
  an.attach();
  for (int i = 0; i < 4; ++i) an.subscribe(Role::subscribed, {"meningitis"}, "men" + std::to_string(i));
  for (int i = 0; i < 3; ++i) an.subscribe(Role::subscribed, {"cholera"}, "cho" + std::to_string(i));
  for (int i = 0; i < 2; ++i) an.subscribe(Role::subscribed, {"country"}, "cty" + std::to_string(i));
  an.subscribe(Role::editorial, {}, "editorial");

  auto record = [](int i) {
    std::vector<std::pair<std::string, std::string>> ents{{i % 2 ? "meningitis" : "cholera", "disease"}};
    if (i % 5 == 0) ents.emplace_back("Niger", "country");
    return make_record("http://x.example/" + std::to_string(i), ymd(2004, 1 + i % 12, 1 + i % 28), "c", ents);
  };
  {
    std::vector<std::jthread> threads;
    for (int t = 0; t < 10; ++t)
      threads.emplace_back([&, t] {
        for (int k = 0; k < 10; ++k) {
          auto r = record(t * 10 + k);
          f.repo.insert(r);
          f.repo.insert(r);        // unchanged: no event
          an.dispatch_on_insert(r);  // racing direct dispatch must not duplicate
        }
      });
  }
  an.drain();

  // 50 meningitis x 4 + 50 cholera x 3 + 20 with a country x 2 + 100 x editorial
  const std::size_t expected = 200 + 150 + 40 + 100;
  CHECK(an.delivered() == expected);
  std::size_t total = 0;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& s : an.subscribers())
    for (const auto& m : an.outbox(s.channel)) {
      ++total;
      CHECK(seen.emplace(m.to, m.record_id).second);
      CHECK(f.repo.get(m.record_id));
    }
  CHECK(total == expected);
}
