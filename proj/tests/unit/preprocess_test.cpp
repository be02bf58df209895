#include <doctest.h>

#include <algorithm>
#include <random>

#include "ccnet/preprocess/annotate.hpp"
#include "golden.hpp"
#include "paths.hpp"

using namespace ccnet;
using namespace ccnet::preprocess;

namespace {

const Ontology& ontology() {
  static const Ontology o = Ontology::load(testing::data_dir() / "ontology.json");
  return o;
}

const Gazetteer& gazetteer() {
  static const Gazetteer g = Gazetteer::load(testing::data_dir() / "gazetteer.tsv", ontology());
  return g;
}

const ChunkerRules& rules() {
  static const ChunkerRules r = ChunkerRules::load(testing::data_dir() / "chunker_rules.tsv");
  return r;
}

std::vector<std::string> texts_of(std::string_view content, const std::vector<text::Span>& spans) {
  std::vector<std::string> out;
  for (const auto& s : spans) out.emplace_back(content.substr(s.begin, s.size()));
  return out;
}

std::vector<std::string> rendered(const std::vector<NamedEntity>& es) {
  std::vector<std::string> out;
  for (const auto& e : es) out.push_back(e.rendered());
  return out;
}

wrapper::CleanedNews news_with(std::string content) {
  wrapper::CleanedNews n;
  n.title = "t";
  n.url = "http://x.example/";
  n.date = std::chrono::year_month_day{std::chrono::year{2004}, std::chrono::April, std::chrono::day{8}};
  n.content = std::move(content);
  return n;
}

const char* kFigSentence = "A rare strain of meningitis, which re-emerged recently in Burkina Faso";

}  // namespace

TEST_CASE("shipped ontology") {
  const auto& o = ontology();
  CHECK(o.tags() == std::vector<std::string>{"entity", "disease", "location", "country", "city", "agent", "person",
                                             "organization", "date"});
  CHECK(o.wh("country") == std::vector<std::string>{"where", "what country"});
  CHECK(o.wh("disease") == std::vector<std::string>{"what disease"});
  CHECK(o.parent("city") == "location");
  CHECK_FALSE(o.parent("entity"));
  CHECK(o.is_a("person", "agent"));
  CHECK(o.is_a("country", "entity"));
  CHECK_FALSE(o.is_a("disease", "location"));
  CHECK_THROWS_AS(o.wh("virus"), OntologyError);
  CHECK(Ontology::parse_json(o.to_json()).to_json() == o.to_json());
}

TEST_CASE("ontology validation") {
  auto base = testing::read_file(testing::data_dir() / "ontology.json");
  auto replace = [&](const std::string& from, const std::string& to) {
    auto s = base;
    auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
  };
  CHECK_NOTHROW(Ontology::parse_json(base));
  CHECK_THROWS_AS(Ontology::parse_json(replace("\"tag\": \"entity\"", "\"tag\": \"thing\"")), OntologyError);
  CHECK_THROWS_AS(Ontology::parse_json(replace("[\"where\", \"what country\"]", "[\"what country\"]")), OntologyError);
  CHECK_THROWS_AS(Ontology::parse_json(replace("[\"when\", \"what date\"]", "[\"what date\"]")), OntologyError);
  CHECK_THROWS_AS(Ontology::parse_json(replace("[\"who\", \"what person\"]", "[\"who\"]")), OntologyError);
  CHECK_THROWS_AS(Ontology::parse_json(replace("\"tag\": \"city\"", "\"tag\": \"country\"")), OntologyError);
  CHECK_THROWS_AS(Ontology::parse_json(replace("{\"tag\": \"date\", \"wh\": [\"when\", \"what date\"], \"children\": []}",
                                               "{\"tag\": \"era\", \"wh\": [\"what era\"], \"children\": []}")),
                  OntologyError);
  CHECK_THROWS_AS(Ontology::parse_json("[1,2]"), OntologyError);
  CHECK_THROWS_AS(Ontology::parse_json("{"), OntologyError);
  // Extra tags are fine as long as they carry their own "what" form.
  CHECK_NOTHROW(Ontology::parse_json(replace("{\"tag\": \"disease\", \"wh\": [\"what disease\"], \"children\": []}",
                                             "{\"tag\": \"disease\", \"wh\": [\"what disease\"], \"children\": "
                                             "[{\"tag\": \"virus\", \"wh\": [\"what virus\"]}]}")));
}

TEST_CASE("gazetteer parsing") {
  const auto& g = gazetteer();
  REQUIRE(g.find("burkina faso"));
  CHECK(g.find("burkina faso")->tag == "country");
  CHECK(g.find("meningitis")->tag == "disease");
  CHECK(g.max_words() >= 3);
  CHECK(Gazetteer::key_of("  Burkina   FASO ") == "burkina faso");

  auto g2 = Gazetteer::parse("# comment\nCholera\tdisease\t1\ncholera\tcountry\t3\nCHOLERA\tcity\t3\n\n", ontology());
  CHECK(g2.size() == 1);
  CHECK(g2.find("cholera")->tag == "city");  // highest weight, then smaller tag
  CHECK(g2.find("cholera")->weight == 3.0);

  auto line_of = [](const std::string& tsv) {
    try {
      Gazetteer::parse(tsv, ontology());
    } catch (const GazetteerError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  CHECK(line_of("x\tdisease\t1\nbad line\n") == 2);
  CHECK(line_of("x\tplanet\t1\n") == 1);
  CHECK(line_of("x\tdisease\t0\n") == 1);
  CHECK(line_of("x\tdisease\tabc\n") == 1);
  CHECK(line_of("#c\n\nU.S.\tcountry\t1\n") == 3);
  CHECK(line_of("ok\tdisease\t1\n") == 0);
}

TEST_CASE("noun-phrase chunking") {
  CHECK(texts_of(kFigSentence, chunk_noun_phrases(kFigSentence, rules())) ==
        std::vector<std::string>{"A rare strain", "meningitis", "Burkina Faso"});
  CHECK(chunk_noun_phrases("", rules()).empty());
  CHECK(chunk_noun_phrases("run quickly", rules()).empty());
  CHECK(texts_of("The World Health Organization said it.", chunk_noun_phrases("The World Health Organization said it.", rules())) ==
        std::vector<std::string>{"The World Health Organization"});
  // Punctuation breaks a phrase; a determiner alone is not a phrase.
  CHECK(texts_of("Mali, Niger and the", chunk_noun_phrases("Mali, Niger and the", rules())) ==
        std::vector<std::string>{"Mali", "Niger"});

  // Gazetteer surfaces count as one nominal unit, even with stop words inside.
  std::string s = "Officials of the Ministry of Health met.";
  CHECK(texts_of(s, chunk_noun_phrases(s, rules(), &gazetteer())) ==
        std::vector<std::string>{"Officials", "the Ministry of Health"});
}

TEST_CASE("entity tagging") {
  auto spans = chunk_noun_phrases(testing::kWhoContent, rules(), &gazetteer());
  auto es = tag_entities(spans, testing::kWhoContent, gazetteer(), ontology());
  CHECK(rendered(es) == std::vector<std::string>{"meningitis[disease]", "Burkina Faso[country]"});
  for (const auto& e : es) CHECK(std::string(testing::kWhoContent).substr(e.span.begin, e.span.size()) == e.surface);

  CHECK(tag_entities(chunk_noun_phrases("Nothing to see", rules()), "Nothing to see", gazetteer(), ontology()).empty());

  auto g = Gazetteer::parse("Nile\tlocation\t1\nWest Nile virus\tdisease\t2\n", ontology());
  std::string s = "Cases of West Nile virus rose.";
  CHECK(rendered(tag_entities(chunk_noun_phrases(s, rules(), &g), s, g, ontology())) ==
        std::vector<std::string>{"West Nile virus[disease]"});

  // Weight beats length; only whole words match, in any case.
  auto g2 = Gazetteer::parse("Nile\tlocation\t5\nWest Nile virus\tdisease\t2\nfever\tdisease\t1\n", ontology());
  CHECK(rendered(tag_entities(chunk_noun_phrases(s, rules(), &g2), s, g2, ontology())) ==
        std::vector<std::string>{"Nile[location]"});
  std::string t = "FEVER spread; a feverish Fever-like Fever";
  CHECK(rendered(tag_entities({{0, t.size()}}, t, g2, ontology())) ==
        std::vector<std::string>{"FEVER[disease]", "Fever[disease]"});

  // Dates are tagged by pattern and win over gazetteer hits.
  std::string d = "On 8 April 2004 meningitis spread.";
  auto g3 = Gazetteer::parse("April\tperson\t9\nmeningitis\tdisease\t1\n", ontology());
  CHECK(rendered(tag_entities(chunk_noun_phrases(d, rules(), &g3), d, g3, ontology())) ==
        std::vector<std::string>{"8 April 2004[date]", "meningitis[disease]"});
}

TEST_CASE("tagging is independent of gazetteer order and maximal") {
  auto lines = text::split(testing::read_file(testing::data_dir() / "gazetteer.tsv"), '\n');
  std::vector<std::string> surfaces;
  for (const auto& e : gazetteer().entries()) surfaces.push_back(e.surface);
  const std::vector<std::string> filler{"the", "outbreak", "of", "in", "and", "a", "new", "strain", ",", ".", "It", "cases"};

  std::mt19937 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    std::string content;
    int n = 3 + rng() % 25;
    for (int k = 0; k < n; ++k) {
      if (!content.empty()) content += ' ';
      content += rng() % 3 == 0 ? surfaces[rng() % surfaces.size()] : filler[rng() % filler.size()];
    }
    std::shuffle(lines.begin(), lines.end(), rng);
    std::string shuffled;
    for (const auto& l : lines) shuffled += l + "\n";
    auto g2 = Gazetteer::parse(shuffled, ontology());

    auto spans = chunk_noun_phrases(content, rules(), &gazetteer());
    auto a = tag_entities(spans, content, gazetteer(), ontology());
    auto b = tag_entities(chunk_noun_phrases(content, rules(), &g2), content, g2, ontology());
    CHECK(a == b);

    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(content.substr(a[i].span.begin, a[i].span.size()) == a[i].surface);
      CHECK(ontology().contains(a[i].tag));
      if (i) CHECK(a[i - 1].span.end <= a[i].span.begin);
    }
    // No gazetteer hit inside a span is left that overlaps nothing chosen.
    auto words = word_spans(content);
    for (const auto& sp : spans)
      for (std::size_t k = 0; k < words.size(); ++k)
        for (std::size_t len = 1; len <= 6 && k + len <= words.size(); ++len) {
          text::Span cand{words[k].begin, words[k + len - 1].end};
          if (cand.begin < sp.begin || cand.end > sp.end) continue;
          if (!gazetteer().find(Gazetteer::key_of(content.substr(cand.begin, cand.size())))) continue;
          bool contiguous = true;
          for (std::size_t j = k + 1; j < k + len; ++j) contiguous &= adjacent(content, words[j - 1], words[j]);
          if (!contiguous) continue;
          CHECK(std::any_of(a.begin(), a.end(), [&](const NamedEntity& e) { return e.span.overlaps(cand); }));
        }
  }
}

TEST_CASE("pronoun resolution") {
  auto run = [](const std::string& s) {
    auto es = tag_entities(chunk_noun_phrases(s, rules(), &gazetteer()), s, gazetteer(), ontology());
    return resolve_pronouns(s, es, ontology());
  };
  CHECK(run("Meningitis re-emerged. It has killed dozens.") == "Meningitis re-emerged. Meningitis has killed dozens.");
  CHECK(run("meningitis re-emerged. It has killed dozens.") == "meningitis re-emerged. Meningitis has killed dozens.");
  CHECK(run("No pronouns here. None at all.") == "No pronouns here. None at all.");
  CHECK(run("Cholera and meningitis spread. It has killed dozens.") ==
        "Cholera and meningitis spread. It has killed dozens.");
  CHECK(run("The World Health Organization responded. They sent teams.") ==
        "The World Health Organization responded. World Health Organization sent teams.");
  CHECK(run("Lee Jong-wook spoke. He urged calm.") == "Lee Jong-wook spoke. Lee Jong-wook urged calm.");
  CHECK(run("Lee Jong-wook spoke. She urged calm.") == "Lee Jong-wook spoke. Lee Jong-wook urged calm.");
  // Countries are not antecedents of "it"; pronouns mid-sentence stay.
  CHECK(run("Niger reported cases. It is worried.") == "Niger reported cases. It is worried.");
  CHECK(run("Cholera spread. Officials say it is contained.") == "Cholera spread. Officials say it is contained.");
  // The antecedent must be in the immediately preceding sentence.
  CHECK(run("Cholera spread. Rain fell. It is contained.") == "Cholera spread. Rain fell. It is contained.");
}

TEST_CASE("annotate") {
  auto a = annotate(news_with(testing::kWhoContent), gazetteer(), ontology(), rules());
  CHECK(rendered(a.entities) == std::vector<std::string>{"meningitis[disease]", "Burkina Faso[country]"});
  CHECK(a.news.content == testing::kWhoContent);

  CHECK(annotate(news_with("Nothing notable happened today."), gazetteer(), ontology(), rules()).entities.empty());

  auto p = annotate(news_with("Cholera re-emerged in Sudan. It has killed dozens."), gazetteer(), ontology(), rules());
  CHECK(p.news.content == "Cholera re-emerged in Sudan. Cholera has killed dozens.");
  CHECK(rendered(p.entities) == std::vector<std::string>{"Cholera[disease]", "Sudan[country]", "Cholera[disease]"});
}

TEST_CASE("annotate is idempotent on its output text") {
  std::vector<std::string> surfaces;
  for (const auto& e : gazetteer().entries()) surfaces.push_back(e.surface);
  const std::vector<std::string> words{"It", "He", "They", "spread", "in", "the", "outbreak", "was", "reported", "and"};
  std::mt19937 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    std::string content;
    int sentences = 1 + rng() % 4;
    for (int s = 0; s < sentences; ++s) {
      int n = 2 + rng() % 6;
      for (int k = 0; k < n; ++k) {
        if (!content.empty()) content += ' ';
        content += rng() % 3 == 0 ? surfaces[rng() % surfaces.size()] : words[rng() % words.size()];
      }
      content += '.';
    }
    auto once = annotate(news_with(content), gazetteer(), ontology(), rules());
    auto twice = annotate(once.news, gazetteer(), ontology(), rules());
    CHECK(twice.news.content == once.news.content);
    CHECK(twice.entities == once.entities);
  }
}
