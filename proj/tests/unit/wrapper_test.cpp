#include <doctest.h>

#include <chrono>
#include <random>

#include "ccnet/wrapper/wrapper.hpp"
#include "golden.hpp"
#include "paths.hpp"

using namespace ccnet;
using namespace ccnet::wrapper;
using namespace std::chrono;

namespace {

crawler::FetchedPage page_of(std::string body, std::string url = "http://news.example/story",
                             std::string content_type = "text/html") {
  crawler::FetchedPage p;
  p.url = std::move(url);
  p.body = std::move(body);
  p.content_type = std::move(content_type);
  p.status = 200;
  p.fetched_at = time_point_cast<milliseconds>(sys_days{year{2024} / 5 / 17} + hours(9));
  return p;
}

crawler::FetchedPage release_page() {
  return page_of(testing::read_file(testing::fixture_dir() / "mirror/www.who.int/mediacentre/releases/2004/pr25/en/index.html"),
                 testing::kWhoUrl);
}

bool has_residual_tag(const std::string& s) {
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (s[i] == '<' && std::isalpha(static_cast<unsigned char>(s[i + 1]))) return true;
  return false;
}

}  // namespace

TEST_CASE("release page cleans to the published record") {
  auto n = clean(release_page());
  CHECK(n.title == testing::kWhoTitle);
  CHECK(n.url == testing::kWhoUrl);
  CHECK(n.date == year_month_day{year{2004}, April, day{8}});
  CHECK(text::format_long_date(n.date) == "8 April 2004");
  CHECK(n.content == testing::kWhoContent);
  CHECK_FALSE(n.date_inferred);
}

TEST_CASE("clean is deterministic and round-trips through JSON") {
  auto a = clean(release_page());
  auto b = clean(release_page());
  CHECK(a == b);
  CHECK(CleanedNews::from_json(a.to_json()) == a);
}

TEST_CASE("degenerate pages fail") {
  CHECK_THROWS_AS(clean(page_of("<html><head><title>T</title></head><body></body></html>")), CleaningFailed);
  CHECK_THROWS_AS(clean(page_of("<html><body><p>text without any title</p></body></html>")), CleaningFailed);
  CHECK_THROWS_AS(clean(page_of("")), CleaningFailed);
}

TEST_CASE("entities are decoded") {
  auto n = clean(page_of("<title>Q &amp; A</title><p>Tom &amp; Jerry&nbsp;say &quot;hi&quot; &#8212; &copy;</p>"));
  CHECK(n.title == "Q & A");
  CHECK(n.content == "Tom & Jerry say \"hi\" \xE2\x80\x94 \xC2\xA9");
}

TEST_CASE("strip_markup") {
  CHECK(strip_markup(R"(<p><font size="3">8 APRIL 2004 | GENEVA -- A rare strain...</font></p>)") ==
        "8 APRIL 2004 | GENEVA -- A rare strain...");
  CHECK(strip_markup("plain text, nothing else") == "plain text, nothing else");

  // Hand-derived expectations for nested markup.
  struct Case {
    const char* in;
    const char* out;
  };
  const Case cases[] = {
      {"<div><p>one</p><p>two</p></div>", "one two"},
      {"<b>bo</b><i>ld</i>", "bold"},
      {"<ul><li>a</li><li>b <em>c</em></li></ul>", "a b c"},
      {"x<script>var s = '<p>no</p>';</script>y", "xy"},
      {"<style>p { color: red }</style><p>styled</p>", "styled"},
      {"<table><tr><td>1</td><td>2</td></tr></table>", "1 2"},
      {"line<br>break", "line break"},
      {"<!-- note --><p>kept</p>", "kept"},
      {"<p>unclosed <b>bold", "unclosed bold"},
      {"a &lt;b&gt; c", "a <b> c"},
  };
  for (const auto& c : cases) CHECK(strip_markup(c.in) == c.out);
}

TEST_CASE("boilerplate and largest paragraph run") {
  const char* html = R"(<html><head><title>Outbreak update</title></head><body>
<nav><p>Home | News | A very long navigation paragraph that would otherwise win the length contest easily.</p></nav>
<div class="sidebar"><p>Related: a long sidebar paragraph listing many other stories and links and more links.</p></div>
<div id="story">
<p>First paragraph of the story.</p>
<p>Second paragraph &amp; more.</p>
</div>
<div><p>Short.</p></div>
<footer><p>Copyright notice that is quite long and would otherwise be picked as the main content.</p></footer>
</body></html>)";
  auto n = clean(page_of(html));
  CHECK(n.title == "Outbreak update");
  CHECK(n.content == "First paragraph of the story.\n\nSecond paragraph & more.");
  CHECK(n.date_inferred);
  CHECK(n.date == year_month_day{year{2024}, May, day{17}});
}

TEST_CASE("date formats and the first one wins") {
  CHECK(clean(page_of("<title>t</title><p>Reported April 8, 2004 and 9 May 2004.</p>")).date ==
        year_month_day{year{2004}, April, day{8}});
  CHECK(clean(page_of("<title>t</title><p>On 2004-04-08 it began.</p>")).date == year_month_day{year{2004}, April, day{8}});
  CHECK(clean(page_of("<title>t</title><p>Dated 8 April 2004.</p>")).date == year_month_day{year{2004}, April, day{8}});
  // Dates inside script bodies and the title are not body text.
  CHECK(clean(page_of("<title>1 January 2001</title><script>x='2 February 2002'</script><p>3 March 2003 text</p>")).date ==
        year_month_day{year{2003}, March, day{3}});
}

TEST_CASE("heading fallback for the title") {
  auto n = clean(page_of("<body><h2> Cholera <i>alert</i> </h2><p>Body text.</p></body>"));
  CHECK(n.title == "Cholera alert");
}

TEST_CASE("declared charset is honoured") {
  std::string latin = "<title>Caf\xE9</title><p>Na\xEFve r\xE9sum\xE9</p>";
  CHECK(clean(page_of(latin, "http://x.example/", "text/html; charset=ISO-8859-1")).content == "Na\xC3\xAFve r\xC3\xA9sum\xC3\xA9");
  std::string meta = "<head><meta charset=\"windows-1252\"><title>\x93Quoted\x94</title></head><p>x</p>";
  CHECK(clean(page_of(meta)).title == "\xE2\x80\x9CQuoted\xE2\x80\x9D");
  // Undecodable UTF-8 is replaced, never passed through.
  auto broken = clean(page_of("<title>t</title><p>bad \xFF byte</p>")).content;
  CHECK(broken == "bad \xEF\xBF\xBD byte");
}

TEST_CASE("dateline removal") {
  CHECK(strip_dateline("8 APRIL 2004 | GENEVA -- A rare strain") == "A rare strain");
  CHECK(strip_dateline("April 8, 2004 -- Officials said") == "Officials said");
  CHECK(strip_dateline("8 April 2004, GENEVA \xE2\x80\x94 Text") == "Text");
  CHECK(strip_dateline("In 8 April 2004 -- news") == "In 8 April 2004 -- news");
  CHECK(strip_dateline("8 April 2004 was a Thursday -- really") == "8 April 2004 was a Thursday -- really");
  CHECK(strip_dateline("No date here") == "No date here");
}

TEST_CASE("content never holds residual tags") {
  std::mt19937 rng(42);
  const std::vector<std::string> pieces{"<p>", "</p>", "<b>", "</b>", "&lt;", "&gt;", "x", " ", "&amp;",
                                        "<div>", "</div>", "<script>s<p></script>", "a", "<", "1 May 2004", "<br/>"};
  int cleaned = 0;
  for (int i = 0; i < 2000; ++i) {
    std::string body = "<title>t</title>";
    int n = 1 + rng() % 20;
    for (int k = 0; k < n; ++k) body += pieces[rng() % pieces.size()];
    try {
      auto c = clean(page_of(body));
      ++cleaned;
      CHECK_FALSE(has_residual_tag(c.content));
      CHECK(c.content == clean(page_of(body)).content);
    } catch (const CleaningFailed&) {
    }
  }
  CHECK(cleaned > 500);
}

TEST_CASE("fetched page JSON keeps raw bytes") {
  auto p = page_of("caf\xE9 <b>", "http://x.example/", "text/html; charset=latin1");
  auto back = crawler::FetchedPage::from_json(p.to_json());
  CHECK(back == p);
  auto q = release_page();
  CHECK(crawler::FetchedPage::from_json(q.to_json()) == q);
}
