#include "ccnet/preprocess/ontology.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <regex>
#include <sstream>

#include <json.hpp>

namespace ccnet::preprocess {

using nlohmann::json;

namespace {

// Tags the converter and the wh rules rely on.
constexpr const char* kRequired[] = {"disease", "location", "country", "city", "agent", "person", "organization", "date"};

bool has(const std::vector<std::string>& v, std::string_view s) { return std::find(v.begin(), v.end(), s) != v.end(); }

}  // namespace

Ontology Ontology::parse_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw OntologyError(std::string("invalid JSON: ") + e.what());
  }
  Ontology o;
  static const std::regex kTagRe("[a-z][a-z0-9_-]*");
  std::function<void(const json&, const std::string&)> walk = [&](const json& j, const std::string& parent) {
    if (!j.is_object() || !j.contains("tag") || !j["tag"].is_string())
      throw OntologyError("every node needs a string \"tag\"");
    auto tag = j["tag"].get<std::string>();
    if (!std::regex_match(tag, kTagRe)) throw OntologyError("bad tag name: " + tag);
    if (o.nodes_.count(tag)) throw OntologyError("tag appears twice: " + tag);
    Node node;
    node.parent = parent;
    if (j.contains("wh")) {
      if (!j["wh"].is_array()) throw OntologyError("wh must be an array: " + tag);
      for (const auto& w : j["wh"]) {
        if (!w.is_string()) throw OntologyError("wh entries must be strings: " + tag);
        node.wh.push_back(w.get<std::string>());
      }
    }
    o.nodes_.emplace(tag, std::move(node));
    if (j.contains("children")) {
      if (!j["children"].is_array()) throw OntologyError("children must be an array: " + tag);
      for (const auto& c : j["children"]) {
        walk(c, tag);
        o.nodes_.at(tag).children.push_back(c["tag"].get<std::string>());
      }
    }
  };
  walk(doc, "");
  o.validate();
  return o;
}

Ontology Ontology::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw OntologyError("cannot read ontology: " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

void Ontology::validate() const {
  auto root = nodes_.find(kRoot);
  if (root == nodes_.end() || !root->second.parent.empty()) throw OntologyError("root tag must be \"entity\"");
  for (const char* tag : kRequired)
    if (!contains(tag)) throw OntologyError(std::string("missing required tag: ") + tag);
  if (!is_a("country", "location") || !is_a("city", "location") || !is_a("person", "agent") ||
      !is_a("organization", "agent"))
    throw OntologyError("country/city must lie under location and person/organization under agent");
  for (const auto& [tag, node] : nodes_) {
    if (node.wh.empty()) throw OntologyError("no wh forms for tag: " + tag);
    if (!has(node.wh, "what " + tag)) throw OntologyError("wh forms of " + tag + " lack \"what " + tag + "\"");
    if (is_a(tag, "location") && !has(node.wh, "where")) throw OntologyError("location tag lacks where: " + tag);
    if (is_a(tag, "agent") && !has(node.wh, "who")) throw OntologyError("agent tag lacks who: " + tag);
    if (is_a(tag, "date") && !has(node.wh, "when")) throw OntologyError("date tag lacks when: " + tag);
    for (const auto& w : node.wh)
      if (w.empty() || w.find_first_of("_*<>&") != std::string::npos)
        throw OntologyError("wh form is not plain words: \"" + w + "\"");
  }
}

std::string Ontology::to_json() const {
  std::function<json(const std::string&)> emit = [&](const std::string& tag) {
    const auto& n = nodes_.at(tag);
    json j{{"tag", tag}, {"wh", n.wh}};
    json children = json::array();
    for (const auto& c : n.children) children.push_back(emit(c));
    j["children"] = children;
    return j;
  };
  return emit(kRoot).dump(2);
}

bool Ontology::contains(std::string_view tag) const { return nodes_.find(tag) != nodes_.end(); }

std::optional<std::string> Ontology::parent(std::string_view tag) const {
  auto it = nodes_.find(tag);
  if (it == nodes_.end() || it->second.parent.empty()) return std::nullopt;
  return it->second.parent;
}

bool Ontology::is_a(std::string_view tag, std::string_view ancestor) const {
  std::string cur(tag);
  while (true) {
    auto it = nodes_.find(cur);
    if (it == nodes_.end()) return false;
    if (cur == ancestor) return true;
    if (it->second.parent.empty()) return false;
    cur = it->second.parent;
  }
}

const std::vector<std::string>& Ontology::wh(std::string_view tag) const {
  auto it = nodes_.find(tag);
  if (it == nodes_.end()) throw OntologyError("unknown tag: " + std::string(tag));
  return it->second.wh;
}

std::vector<std::string> Ontology::tags() const {
  std::vector<std::string> out;
  std::function<void(const std::string&)> visit = [&](const std::string& t) {
    out.push_back(t);
    for (const auto& c : nodes_.at(t).children) visit(c);
  };
  visit(kRoot);
  return out;
}

}  // namespace ccnet::preprocess
