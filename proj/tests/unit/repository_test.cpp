#include <doctest.h>

#include <random>
#include <set>
#include <thread>

#include "ccnet/repository/repository.hpp"
#include "paths.hpp"
#include "records.hpp"

using namespace ccnet;
using namespace ccnet::repository;
using testing::make_record;
using testing::who_record;
using testing::ymd;

TEST_CASE("record id is a function of the canonical url") {
  CHECK(record_id(testing::kWhoUrl) == record_id("HTTP://WWW.WHO.INT:80/mediacentre/releases/2004/pr25/en/#x"));
  CHECK(record_id(testing::kWhoUrl).size() == 16);
  CHECK(record_id("http://a.example/1") != record_id("http://a.example/2"));
  CHECK(record_id(testing::kWhoUrl) == text::to_hex(text::fnv1a64(testing::kWhoUrl)));
}

TEST_CASE("insert outcomes") {
  Repository repo;
  CHECK(repo.insert(who_record()) == InsertOutcome::inserted);
  CHECK(repo.size() == 1);
  CHECK(repo.insert(who_record()) == InsertOutcome::unchanged);
  CHECK(repo.size() == 1);

  auto later = who_record();
  later.ingested_at = testing::at_ms(1181382400000);
  CHECK(repo.insert(later) == InsertOutcome::unchanged);

  auto edited = who_record();
  edited.content = "A rare strain of meningitis, which re-emerged lately in Burkina Faso...";
  CHECK(repo.insert(edited) == InsertOutcome::replaced);
  CHECK(repo.size() == 1);
  CHECK(repo.get(edited.id)->content == edited.content);
}

TEST_CASE("queries") {
  Repository repo;
  CHECK(repo.query({}).empty());
  CHECK(repo.query({.surface = "meningitis"}).empty());
  repo.insert(who_record());

  auto hits = repo.query({.surface = "meningitis", .tag = "disease"});
  REQUIRE(hits.size() == 1);
  CHECK(hits[0] == who_record());
  CHECK(repo.query({.surface = "MENINGITIS"}).size() == 1);
  CHECK(repo.query({.surface = "meningitis", .tag = "country"}).empty());  // same entity must satisfy both
  CHECK(repo.query({.tag = "country"}).size() == 1);
  CHECK(repo.query({.to = ymd(2004, 4, 7)}).empty());
  CHECK(repo.query({.from = ymd(2004, 4, 9)}).empty());
  CHECK(repo.query({.from = ymd(2004, 4, 8), .to = ymd(2004, 4, 8)}).size() == 1);

  repo.insert(make_record("http://x.example/flu", ymd(2004, 1, 27), "flu", {{"avian influenza", "disease"}}));
  repo.insert(make_record("http://x.example/new", ymd(2005, 1, 1), "new", {{"meningitis", "disease"}}));
  auto all = repo.query({});
  REQUIRE(all.size() == 3);
  CHECK(all[0].url == "http://x.example/new");
  CHECK(all[2].url == "http://x.example/flu");
  CHECK(repo.latest(1).size() == 1);
  CHECK(repo.latest(1)[0].url == "http://x.example/new");
  CHECK(repo.latest(10).size() == 3);
}

TEST_CASE("related records") {
  Repository repo;
  repo.insert(who_record());
  CHECK(repo.related(who_record().id, 5).empty());
  CHECK_THROWS_AS(repo.related("0000000000000000", 5), RepositoryError);

  auto one = make_record("http://x.example/one", ymd(2004, 5, 1), "c", {{"Meningitis", "disease"}});
  auto two = make_record("http://x.example/two", ymd(2004, 3, 1), "c", {{"meningitis", "disease"}, {"Burkina Faso", "country"}});
  auto none = make_record("http://x.example/none", ymd(2004, 6, 1), "c", {{"cholera", "disease"}});
  repo.insert(one);
  repo.insert(two);
  repo.insert(none);

  auto rel = repo.related(who_record().id, 5);
  REQUIRE(rel.size() == 2);
  CHECK(rel[0].id == two.id);  // two shared surfaces
  CHECK(rel[1].id == one.id);
  CHECK(repo.related(who_record().id, 1).size() == 1);
  auto back = repo.related(one.id, 5);
  CHECK(back[0].id == who_record().id);  // tie on one shared surface: newer first
  CHECK(back[1].id == two.id);
}

TEST_CASE("journal replay and hooks") {
  testing::ScratchDir dir("repo");
  auto path = dir / "news.jsonl";
  std::vector<std::pair<std::string, InsertOutcome>> events;
  {
    Repository repo(path);
    repo.on_change([&](const NewsRecord& r, InsertOutcome o) { events.emplace_back(r.id, o); });
    repo.insert(who_record());
    repo.insert(who_record());
    auto edited = who_record();
    edited.title = "Edited";
    repo.insert(edited);
    repo.insert(make_record("http://x.example/a", ymd(2004, 1, 1), "c", {}));
  }
  CHECK(events.size() == 3);
  CHECK(events[0].second == InsertOutcome::inserted);
  CHECK(events[1].second == InsertOutcome::replaced);

  Repository reopened(path);
  CHECK(reopened.size() == 2);
  CHECK(reopened.get(who_record().id)->title == "Edited");
  CHECK(reopened.insert(make_record("http://x.example/a", ymd(2004, 1, 1), "c", {})) == InsertOutcome::unchanged);

  auto r = who_record();
  CHECK(NewsRecord::from_json(r.to_json()) == r);

  std::ofstream(dir / "bad.jsonl") << who_record().to_json() << "\n{not json\n";
  CHECK_THROWS_AS(Repository(dir / "bad.jsonl"), RepositoryError);
}

TEST_CASE("storage failure leaves the store unmodified") {
  testing::ScratchDir dir("repo_fail");
  auto path = dir / "sub" / "news.jsonl";  // parent directory missing
  Repository repo(path);
  CHECK_THROWS_AS(repo.insert(who_record()), RepositoryError);
  CHECK(repo.size() == 0);
}

TEST_CASE("count equals distinct canonical urls; filtered results are a subset") {
  std::mt19937 rng(3);
  Repository repo;
  std::set<std::string> urls;
  const std::vector<std::pair<std::string, std::string>> pool{
      {"meningitis", "disease"}, {"cholera", "disease"}, {"Niger", "country"}, {"Geneva", "city"}};
  for (int i = 0; i < 400; ++i) {
    auto url = "http://x.example/" + std::to_string(rng() % 60);
    if (rng() % 2) url = "HTTP://X.EXAMPLE:80/" + url.substr(17);
    urls.insert(canonicalize(url));
    std::vector<std::pair<std::string, std::string>> ents;
    for (const auto& e : pool)
      if (rng() % 2) ents.push_back(e);
    repo.insert(make_record(url, ymd(2004, 1 + rng() % 12, 1 + rng() % 28), "c" + std::to_string(rng() % 3), ents));
  }
  CHECK(repo.size() == urls.size());
  std::set<std::string> all;
  for (const auto& r : repo.query({})) all.insert(r.id);
  for (const auto& [surface, tag] : pool) {
    auto filtered = repo.query({.surface = surface, .to = ymd(2004, 6, 30)});
    for (const auto& r : filtered) {
      CHECK(all.count(r.id));
      CHECK(r.has_surface(surface));
      CHECK(r.date <= ymd(2004, 6, 30));
    }
    auto q = repo.query({.tag = tag});
    for (std::size_t i = 1; i < q.size(); ++i) CHECK(q[i - 1].date >= q[i].date);
    for (const auto& r : repo.query({.surface = surface})) {
      auto rel = repo.related(r.id, 3);
      CHECK(rel.size() <= 3);
      for (const auto& x : rel) CHECK(x.id != r.id);
    }
  }
}

TEST_CASE("concurrent readers during writes") {
  Repository repo;
  std::atomic<bool> done{false};
  std::atomic<int> reads{0};
  std::vector<std::jthread> readers;
  for (int t = 0; t < 4; ++t)
    readers.emplace_back([&] {
      while (!done) {
        auto all = repo.query({});
        for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].date >= all[i].date);
        ++reads;
      }
    });
  for (int i = 0; i < 300; ++i)
    repo.insert(make_record("http://x.example/" + std::to_string(i), ymd(2004, 1 + i % 12, 1 + i % 28), "c", {}));
  done = true;
  readers.clear();
  CHECK(repo.size() == 300);
  CHECK(reads > 0);
}
