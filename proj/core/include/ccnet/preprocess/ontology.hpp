#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ccnet::preprocess {

class OntologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tag tree rooted at "entity" with the wh-forms each tag answers to.
/// Immutable after construction.
class Ontology {
 public:
  /// JSON tree of {tag, children[], wh[]} objects. Throws OntologyError when
  /// the document breaks a tree or wh-form rule (see validate()).
  static Ontology parse_json(std::string_view json);
  static Ontology load(const std::filesystem::path& file);
  std::string to_json() const;

  bool contains(std::string_view tag) const;
  std::optional<std::string> parent(std::string_view tag) const;
  /// True when `tag` is `ancestor` or lies below it.
  bool is_a(std::string_view tag, std::string_view ancestor) const;
  /// Throws OntologyError for an unknown tag.
  const std::vector<std::string>& wh(std::string_view tag) const;
  std::vector<std::string> tags() const;  // pre-order

  static constexpr const char* kRoot = "entity";

 private:
  struct Node {
    std::string parent;  // empty for the root
    std::vector<std::string> children;
    std::vector<std::string> wh;
  };
  void validate() const;

  std::map<std::string, Node, std::less<>> nodes_;
};

}  // namespace ccnet::preprocess
