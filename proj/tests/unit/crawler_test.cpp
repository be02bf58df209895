#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "ccnet/crawler/crawler.hpp"
#include "ccnet/url.hpp"
#include "paths.hpp"

using namespace ccnet;
using namespace ccnet::crawler;

namespace {

// A site as an adjacency list; the page bodies are generated from it.
using Site = std::map<std::string, std::vector<std::string>>;

std::string page_html(const std::vector<std::string>& links) {
  std::string html = "<html><head><title>t</title></head><body>";
  for (const auto& l : links) html += "<p><a href=\"" + l + "\">link</a></p>";
  return html + "</body></html>";
}

void install(StaticFetcher& f, const Site& site) {
  for (const auto& [url, links] : site) f.add_page(url, page_html(links));
}

CrawlConfig config_for(std::vector<std::string> roots, int depth, std::vector<std::string> hosts, int pages = 1000) {
  CrawlConfig c;
  c.roots = std::move(roots);
  c.max_depth = depth;
  c.max_pages = pages;
  c.allowed_hosts = std::move(hosts);
  c.fetch_delay = std::chrono::milliseconds(0);
  c.timeout = std::chrono::milliseconds(1000);
  return c;
}

std::vector<std::string> fetched_urls(const CrawlResult& r) {
  std::vector<std::string> out;
  for (const auto& e : r.log)
    if (e.outcome == Outcome::fetched) out.push_back(e.url);
  return out;
}

// Reference BFS over the site graph: the set a correct crawler fetches when
// the page budget is not binding.
std::set<std::string> bfs_oracle(const Site& site, const CrawlConfig& c) {
  std::set<std::string> seen, fetched;
  std::vector<std::string> level;
  for (const auto& r : c.roots)
    if (seen.insert(canonicalize(r)).second) level.push_back(canonicalize(r));
  for (int depth = 0; !level.empty(); ++depth) {
    std::vector<std::string> next;
    for (const auto& u : level) {
      auto it = site.find(u);
      if (it == site.end()) continue;
      fetched.insert(u);
      for (const auto& l : it->second) {
        auto cu = canonicalize(Url::parse(u).resolve(l).str());
        if (!seen.insert(cu).second) continue;
        if (!c.host_allowed(Url::parse(cu).host()) || depth + 1 > c.max_depth) continue;
        next.push_back(cu);
      }
    }
    level = std::move(next);
  }
  return fetched;
}

const Site kThreeLevel = {
    {"http://h.example/", {"/a", "/b", "http://elsewhere.example/x"}},
    {"http://h.example/a", {"/c", "/"}},
    {"http://h.example/b", {"/a"}},
    {"http://h.example/c", {}},
};

}  // namespace

TEST_CASE("canonicalize examples and idempotence") {
  CHECK(canonicalize("HTTP://Who.INT/en/#top") == "http://who.int/en/");
  CHECK(canonicalize("http://who.int:80/a") == "http://who.int/a");
  CHECK(canonicalize("https://who.int:443") == "https://who.int/");
  CHECK(canonicalize("http://who.int:8080/a/./b/../c") == "http://who.int:8080/a/c");
  CHECK_THROWS_AS(canonicalize("not a url"), UrlError);

  std::mt19937 rng(7);
  const std::vector<std::string> schemes{"http", "HTTP", "https"};
  const std::vector<std::string> hosts{"Who.Int", "h.example", "A.B.C"};
  const std::vector<std::string> ports{"", ":80", ":443", ":8080"};
  const std::vector<std::string> segs{"a", ".", "..", "B", "x%20y", ""};
  for (int i = 0; i < 500; ++i) {
    std::string u = schemes[rng() % 3] + "://" + hosts[rng() % 3] + ports[rng() % 4];
    int n = rng() % 5;
    for (int k = 0; k < n; ++k) u += "/" + segs[rng() % segs.size()];
    if (rng() % 2) u += "?q=" + std::to_string(rng() % 10);
    if (rng() % 2) u += "#frag";
    auto once = canonicalize(u);
    CHECK(canonicalize(once) == once);
    CHECK(once.find('#') == std::string::npos);
  }
}

TEST_CASE("extract_links") {
  FetchedPage p;
  p.url = "https://h.example/a";
  p.body = R"(<a href="/x">x</a>)";
  CHECK(extract_links(p) == std::vector<std::string>{"https://h.example/x"});

  p.body = R"(<a href="/x">1</a><A HREF='/x#frag'>2</A><a href="y">3</a>)";
  CHECK(extract_links(p) == std::vector<std::string>{"https://h.example/x", "https://h.example/y"});

  p.body = R"html(<a href="mailto:m@h.example">m</a><a href="javascript:void(0)">j</a><a href="">e</a><a name="n">n</a>)html";
  CHECK(extract_links(p).empty());

  p.body = R"(<head><base href="http://other.example/dir/"></head><a href="z.html">z</a>)";
  CHECK(extract_links(p) == std::vector<std::string>{"http://other.example/dir/z.html"});

  // The release page skeleton with one off-site anchor: the target comes out as written.
  p.url = "http://www.who.int/mediacentre/releases/2004/pr25/en/";
  p.body = R"(<html><head><title>New meningitis threat being contained by web of partnerships</title></head>
<p><font face="Times, Times New Roman, serif" size="3">
8 APRIL 2004 | GENEVA -- A rare strain of meningitis, which re-emerged recently in Burkina
Faso...</font></p><p><a href="http://www.unicef.org/media/">UNICEF</a></p></html>)";
  CHECK(extract_links(p) == std::vector<std::string>{"http://www.unicef.org/media/"});

  p.url = "relative/only";
  CHECK(extract_links(p).empty());
}

TEST_CASE("config parsing and validation") {
  auto c = CrawlConfig::from_json(R"({"roots":["http://Who.int/"],"max_depth":2,"max_pages":10,
    "allowed_hosts":["WHO.int"],"fetch_delay_ms":500,"timeout_ms":2000})");
  CHECK(c.max_depth == 2);
  CHECK(c.fetch_delay.count() == 500);
  CHECK(c.concurrency == 4);
  CHECK(c.host_allowed("who.INT"));
  CHECK(CrawlConfig::from_json(c.to_json()).to_json() == c.to_json());

  CHECK_THROWS_AS(CrawlConfig::from_json("{"), ConfigError);
  CHECK_THROWS_AS(CrawlConfig::from_json(R"({"roots":[]})"), ConfigError);
  CHECK_THROWS_AS(CrawlConfig::from_json(R"({"roots":["http://a.example/"],"max_depth":1,"max_pages":1,
    "allowed_hosts":["b.example"],"fetch_delay_ms":0,"timeout_ms":1})"),
                  ConfigError);
  CHECK_THROWS_AS(CrawlConfig::from_json(R"({"roots":["ftp://a.example/"],"max_depth":1,"max_pages":1,
    "allowed_hosts":["a.example"],"fetch_delay_ms":0,"timeout_ms":1})"),
                  ConfigError);
  CHECK_THROWS_AS(CrawlConfig::from_json(R"({"roots":[],"max_depth":-1,"max_pages":1,
    "allowed_hosts":[],"fetch_delay_ms":0,"timeout_ms":1})"),
                  ConfigError);
  CHECK_THROWS_AS(CrawlConfig::from_json(R"({"roots":[],"max_depth":"1","max_pages":1,
    "allowed_hosts":[],"fetch_delay_ms":0,"timeout_ms":1})"),
                  ConfigError);
}

TEST_CASE("depth zero fetches only the root") {
  StaticFetcher f;
  install(f, kThreeLevel);
  std::vector<FetchedPage> pages;
  auto r = crawl(config_for({"http://h.example/"}, 0, {"h.example"}), f, [&](FetchedPage p) { pages.push_back(p); });
  REQUIRE(pages.size() == 1);
  CHECK(pages[0].url == "http://h.example/");
  CHECK(pages[0].depth == 0);
  CHECK(pages[0].status == 200);
  CHECK(f.requests().size() == 1);
}

TEST_CASE("three-level site") {
  StaticFetcher f;
  install(f, kThreeLevel);
  auto c = config_for({"http://h.example/"}, 1, {"h.example"});
  std::vector<std::string> emitted;
  auto r = crawl(c, f, [&](FetchedPage p) { emitted.push_back(p.url); });

  CHECK(emitted == std::vector<std::string>{"http://h.example/", "http://h.example/a", "http://h.example/b"});
  CHECK(fetched_urls(r) == emitted);
  CHECK(r.fetched == 3);

  std::map<std::string, Outcome> first;
  for (const auto& e : r.log) first.try_emplace(e.url, e.outcome);
  CHECK(first.at("http://h.example/c") == Outcome::skipped_depth);
  CHECK(first.at("http://elsewhere.example/x") == Outcome::skipped_host);

  // root, then its three links, then /a's two links, then /b's one link.
  CHECK(r.log.size() == 1 + 3 + 2 + 1);

  c.max_depth = 2;
  auto r2 = crawl(c, f, {});
  CHECK(fetched_urls(r2) ==
        std::vector<std::string>{"http://h.example/", "http://h.example/a", "http://h.example/b", "http://h.example/c"});
}

TEST_CASE("page budget") {
  StaticFetcher f;
  install(f, kThreeLevel);
  auto r = crawl(config_for({"http://h.example/"}, 2, {"h.example"}, 2), f, {});
  CHECK(r.fetched == 2);
  CHECK(f.requests().size() == 2);
  int limited = 0;
  for (const auto& e : r.log) limited += e.outcome == Outcome::skipped_limit;
  CHECK(limited == 2);  // /b in the first level, then /c found on /a
}

TEST_CASE("unreachable roots and error outcomes") {
  StaticFetcher f;
  f.add_page("http://ok.example/", page_html({"/missing", "/doc.pdf"}));
  f.add_response("http://ok.example/missing", FetchResponse{404, "text/html", "gone", std::nullopt});
  f.add_response("http://ok.example/doc.pdf", FetchResponse{200, "application/pdf", "%PDF", std::nullopt});
  auto c = config_for({"http://down.example/", "http://ok.example/"}, 1, {"down.example", "ok.example"});
  std::vector<std::string> emitted;
  auto r = crawl(c, f, [&](FetchedPage p) { emitted.push_back(p.url); });
  CHECK(emitted == std::vector<std::string>{"http://ok.example/"});
  CHECK(r.errors == 2);
  std::map<std::string, CrawlLogEntry> by_url;
  for (const auto& e : r.log) by_url[e.url] = e;
  CHECK(by_url.at("http://down.example/").outcome == Outcome::error);
  CHECK(by_url.at("http://down.example/").message == "connection refused");
  CHECK(by_url.at("http://ok.example/missing").status == 404);
  CHECK(by_url.at("http://ok.example/missing").message == "http 404");
  CHECK(by_url.at("http://ok.example/doc.pdf").outcome == Outcome::skipped_content_type);

  StaticFetcher empty;
  auto r2 = crawl(config_for({"http://down.example/"}, 3, {"down.example"}), empty, [](FetchedPage) { FAIL("emitted"); });
  CHECK(r2.fetched == 0);
  REQUIRE(r2.log.size() == 1);
  CHECK(r2.log[0].outcome == Outcome::error);
}

TEST_CASE("duplicate roots are fetched once") {
  StaticFetcher f;
  install(f, kThreeLevel);
  auto r = crawl(config_for({"http://h.example/", "HTTP://H.example:80/#x"}, 0, {"h.example"}), f, {});
  CHECK(f.requests().size() == 1);
  CHECK(r.log.at(0).outcome == Outcome::skipped_duplicate);
}

TEST_CASE("politeness spacing with a fake clock") {
  FakeClock clock(Timestamp{} + std::chrono::hours(1000));
  StaticFetcher f(&clock);
  Site site{{"http://p.example/", {"/1", "/2", "/3", "http://q.example/"}},
            {"http://p.example/1", {}},
            {"http://p.example/2", {}},
            {"http://p.example/3", {"http://q.example/z"}},
            {"http://q.example/", {"/z"}},
            {"http://q.example/z", {}}};
  install(f, site);
  auto c = config_for({"http://p.example/"}, 2, {"p.example", "q.example"});
  c.fetch_delay = std::chrono::milliseconds(250);
  c.concurrency = 1;
  crawl(c, f, {}, CrawlOptions{&clock, &clock, nullptr});

  std::map<std::string, std::vector<Timestamp>> per_host;
  for (const auto& req : f.requests()) per_host[Url::parse(req.url).host()].push_back(req.at);
  CHECK(per_host["p.example"].size() == 4);
  CHECK(per_host["q.example"].size() == 2);
  for (const auto& [host, times] : per_host)
    for (std::size_t i = 1; i < times.size(); ++i) CHECK(times[i] - times[i - 1] >= c.fetch_delay);
}

TEST_CASE("log sink round-trip") {
  testing::ScratchDir dir("crawl_log");
  auto file = dir.path() / "crawl.jsonl";
  StaticFetcher f;
  install(f, kThreeLevel);
  CrawlResult r;
  {
    JsonlCrawlLog log(file);
    r = crawl(config_for({"http://h.example/"}, 1, {"h.example"}), f, {}, CrawlOptions{nullptr, nullptr, &log});
  }
  CHECK(JsonlCrawlLog::read(file) == r.log);
  {
    JsonlCrawlLog log(file);
    crawl(config_for({"http://h.example/"}, 0, {"h.example"}), f, {}, CrawlOptions{nullptr, nullptr, &log});
  }
  CHECK(JsonlCrawlLog::read(file).size() == r.log.size() + 4);  // root and its three links

  CrawlLogEntry e{"http://x.example/", 2, 500, 17, Outcome::error, "http 500"};
  CHECK(CrawlLogEntry::from_json(e.to_json()) == e);
}

TEST_CASE("random sites agree with the BFS oracle") {
  std::mt19937 rng(20040408);
  const std::vector<std::string> hosts{"a.example", "b.example", "c.example"};
  for (int trial = 0; trial < 150; ++trial) {
    int n = 2 + rng() % 12;
    std::vector<std::string> urls;
    for (int i = 0; i < n; ++i) urls.push_back("http://" + hosts[rng() % 3] + "/p" + std::to_string(i));
    Site site;
    for (const auto& u : urls) {
      auto& links = site[u];
      int k = rng() % 4;
      for (int j = 0; j < k; ++j) links.push_back(urls[rng() % urls.size()]);
      if (rng() % 5 == 0) links.push_back("http://dead.example/none");
    }
    StaticFetcher f;
    install(f, site);
    auto c = config_for({urls[0]}, rng() % 4, {"a.example", "b.example", "c.example", "dead.example"});
    if (rng() % 3 == 0) c.allowed_hosts.erase(c.allowed_hosts.begin() + 1);
    if (Url::parse(urls[0]).host() == "b.example") c.allowed_hosts.push_back("b.example");
    c.concurrency = 1 + rng() % 4;

    auto r = crawl(c, f, {});
    auto got = fetched_urls(r);
    std::set<std::string> got_set(got.begin(), got.end());
    CHECK(got_set.size() == got.size());
    CHECK(got_set == bfs_oracle(site, c));

    std::multiset<std::string> requested;
    for (const auto& req : f.requests()) requested.insert(req.url);
    std::set<std::string> distinct(requested.begin(), requested.end());
    CHECK(distinct.size() == requested.size());

    // One entry for the root plus one per distinct link on each fetched page.
    std::size_t expected = 1;
    for (const auto& u : got) {
      std::set<std::string> links;
      for (const auto& l : site.at(u)) links.insert(l);
      expected += links.size();
    }
    CHECK(r.log.size() == expected);
    for (const auto& e : r.log) CHECK(e.depth <= c.max_depth + 1);
  }
}

TEST_CASE("mirror fetcher") {
  MirrorFetcher m(testing::fixture_dir() / "mirror");
  auto page = m.fetch(Url::parse("http://www.who.int/mediacentre/releases/2004/pr25/en/"), std::chrono::seconds(1));
  CHECK(page.status == 200);
  CHECK(page.content_type == "text/html");
  CHECK(page.body.find("Burkina") != std::string::npos);
  CHECK(m.fetch(Url::parse("http://www.who.int/mediacentre/releases/2004/pr25/en"), {}).status == 200);
  CHECK(m.fetch(Url::parse("http://www.who.int/nothing/"), {}).status == 404);
  CHECK(m.fetch(Url::parse("http://www.who.int/mediacentre/releases/2004/report.pdf"), {}).content_type ==
        "application/pdf");

  auto c = config_for({"http://www.who.int/mediacentre/releases/2004/"}, 1, {"www.who.int"});
  std::vector<std::string> emitted;
  auto r = crawl(c, m, [&](FetchedPage p) { emitted.push_back(p.url); });
  CHECK(emitted == std::vector<std::string>{"http://www.who.int/mediacentre/releases/2004/",
                                            "http://www.who.int/mediacentre/releases/2004/pr25/en/",
                                            "http://www.who.int/mediacentre/releases/2004/pr31/en/"});
}
