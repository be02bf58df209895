#include "ccnet/repository/repository.hpp"

#include <algorithm>
#include <mutex>
#include <set>

#include <json.hpp>

#include "ccnet/url.hpp"

namespace ccnet::repository {

using nlohmann::json;

std::string record_id(std::string_view url) { return text::to_hex(text::fnv1a64(canonicalize(url))); }

std::string_view to_string(InsertOutcome o) {
  switch (o) {
    case InsertOutcome::inserted: return "inserted";
    case InsertOutcome::replaced: return "replaced";
    case InsertOutcome::unchanged: return "unchanged";
  }
  return "unchanged";
}

NewsRecord NewsRecord::from_annotated(const preprocess::AnnotatedNews& a, text::Timestamp ingested_at) {
  NewsRecord r;
  r.url = canonicalize(a.news.url);
  r.id = record_id(r.url);
  r.date = a.news.date;
  r.title = a.news.title;
  r.content = a.news.content;
  r.entities = a.entities;
  r.ingested_at = ingested_at;
  return r;
}

namespace {

json content_json(const NewsRecord& r) {
  json entities = json::array();
  for (const auto& e : r.entities)
    entities.push_back({{"surface", e.surface}, {"tag", e.tag}, {"span", {e.span.begin, e.span.end}}, {"weight", e.weight}});
  return json{{"url", r.url},
              {"date", text::format_iso_date(r.date)},
              {"title", r.title},
              {"content", r.content},
              {"entities", entities}};
}

}  // namespace

std::string NewsRecord::to_json() const {
  auto j = content_json(*this);
  j["ingested_at"] = text::format_timestamp(ingested_at);
  return j.dump();
}

NewsRecord NewsRecord::from_json(std::string_view line) {
  try {
    auto j = json::parse(line);
    NewsRecord r;
    r.url = j.at("url").get<std::string>();
    r.id = record_id(r.url);
    auto d = text::parse_iso_date(j.at("date").get<std::string>());
    if (!d) throw RepositoryError("bad date");
    r.date = *d;
    r.title = j.at("title").get<std::string>();
    r.content = j.at("content").get<std::string>();
    for (const auto& e : j.at("entities")) {
      preprocess::NamedEntity ne;
      ne.surface = e.at("surface").get<std::string>();
      ne.tag = e.at("tag").get<std::string>();
      ne.span = {e.at("span").at(0).get<std::size_t>(), e.at("span").at(1).get<std::size_t>()};
      ne.weight = e.at("weight").get<double>();
      r.entities.push_back(std::move(ne));
    }
    auto at = text::parse_timestamp(j.at("ingested_at").get<std::string>());
    if (!at) throw RepositoryError("bad ingested_at");
    r.ingested_at = *at;
    return r;
  } catch (const json::exception& e) {
    throw RepositoryError(std::string("malformed record: ") + e.what());
  } catch (const UrlError& e) {
    throw RepositoryError(std::string("malformed record url: ") + e.what());
  }
}

std::string NewsRecord::revision() const { return text::to_hex(text::fnv1a64(content_json(*this).dump())); }

bool NewsRecord::has_surface(std::string_view surface) const {
  return std::any_of(entities.begin(), entities.end(),
                     [&](const preprocess::NamedEntity& e) { return text::equals_icase(e.surface, surface); });
}

Repository::Repository(const std::filesystem::path& journal) : journal_(journal) {
  std::ifstream in(journal, std::ios::binary);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      auto r = NewsRecord::from_json(line);
      records_.insert_or_assign(r.id, std::move(r));
    } catch (const RepositoryError& e) {
      throw RepositoryError(journal.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

InsertOutcome Repository::insert(NewsRecord record) {
  record.url = canonicalize(record.url);
  record.id = record_id(record.url);
  InsertOutcome outcome;
  std::vector<Hook> hooks;
  {
    std::unique_lock lock(mu_);
    auto it = records_.find(record.id);
    if (it != records_.end() && it->second.same_content(record)) return InsertOutcome::unchanged;
    outcome = it == records_.end() ? InsertOutcome::inserted : InsertOutcome::replaced;
    if (journal_) {
      std::ofstream out(*journal_, std::ios::app | std::ios::binary);
      out << record.to_json() << '\n';
      out.flush();
      if (!out) throw RepositoryError("cannot append to journal: " + journal_->string());
    }
    records_.insert_or_assign(record.id, record);
    hooks = hooks_;
  }
  for (const auto& h : hooks) h(record, outcome);
  return outcome;
}

std::optional<NewsRecord> Repository::get(std::string_view id) const {
  std::shared_lock lock(mu_);
  auto it = records_.find(id);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

std::vector<NewsRecord> Repository::sorted(std::vector<NewsRecord> records) const {
  std::sort(records.begin(), records.end(), [](const NewsRecord& a, const NewsRecord& b) {
    if (a.date != b.date) return a.date > b.date;
    if (a.ingested_at != b.ingested_at) return a.ingested_at > b.ingested_at;
    return a.id < b.id;
  });
  return records;
}

std::vector<NewsRecord> Repository::query(const Filter& f) const {
  std::vector<NewsRecord> out;
  {
    std::shared_lock lock(mu_);
    for (const auto& [id, r] : records_) {
      if (f.from && r.date < *f.from) continue;
      if (f.to && r.date > *f.to) continue;
      // Surface and tag must hold for the same entity.
      if (f.surface || f.tag) {
        bool hit = std::any_of(r.entities.begin(), r.entities.end(), [&](const preprocess::NamedEntity& e) {
          return (!f.surface || text::equals_icase(e.surface, *f.surface)) && (!f.tag || e.tag == *f.tag);
        });
        if (!hit) continue;
      }
      out.push_back(r);
    }
  }
  return sorted(std::move(out));
}

std::vector<NewsRecord> Repository::latest(std::size_t limit) const {
  auto all = query({});
  if (all.size() > limit) all.resize(limit);
  return all;
}

std::vector<NewsRecord> Repository::related(std::string_view id, std::size_t limit) const {
  std::shared_lock lock(mu_);
  auto self = records_.find(id);
  if (self == records_.end()) throw RepositoryError("unknown record: " + std::string(id));
  std::set<std::string> mine;
  for (const auto& e : self->second.entities) mine.insert(text::to_lower_ascii(e.surface));

  std::vector<std::pair<std::size_t, const NewsRecord*>> scored;
  for (const auto& [other_id, r] : records_) {
    if (other_id == self->first) continue;
    std::set<std::string> theirs;
    for (const auto& e : r.entities) theirs.insert(text::to_lower_ascii(e.surface));
    std::size_t shared = 0;
    for (const auto& s : theirs) shared += mine.count(s);
    if (shared) scored.emplace_back(shared, &r);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    if (a.second->date != b.second->date) return a.second->date > b.second->date;
    return a.second->id < b.second->id;
  });
  std::vector<NewsRecord> out;
  for (std::size_t i = 0; i < scored.size() && i < limit; ++i) out.push_back(*scored[i].second);
  return out;
}

std::size_t Repository::size() const {
  std::shared_lock lock(mu_);
  return records_.size();
}

void Repository::on_change(Hook hook) {
  std::unique_lock lock(mu_);
  hooks_.push_back(std::move(hook));
}

}  // namespace ccnet::repository
