#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ccnet/aiml/knowledge_base.hpp"
#include "ccnet/aiml/types.hpp"
#include "ccnet/preprocess/ontology.hpp"
#include "ccnet/repository/repository.hpp"

namespace ccnet::converter {

class TemplateError : public std::runtime_error {
 public:
  TemplateError(int line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ConversionSkipped : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PatternSlot { wh, disease, wildcard };
enum class BodySlot { excerpt, url };

using PatternPiece = std::variant<std::string, PatternSlot>;  // string: literal word
using BodyPiece = std::variant<aiml::Text, aiml::ExpressionCue, BodySlot>;

/// One template of the bank. The pattern holds WH and DISEASE once each; the
/// body holds EXCERPT and URL once each.
struct TemplateSpec {
  std::string name;
  std::vector<PatternPiece> pattern;
  std::vector<BodyPiece> body;

  void validate() const;  // throws TemplateError
};

/// `<templatebank><category name="A"><pattern>..</pattern><template>..
/// </template></category>..</templatebank>` with the placeholders [wh-token],
/// [disease], [excerpt] and [url] (the long forms "[wh-token corresponding
/// to the ontology tag]", "[disease named_entity]" and "[first two lines of
/// content]" are accepted too). The URL goes inside a window.open script.
class TemplateBank {
 public:
  static TemplateBank parse(std::string_view xml);
  static TemplateBank load(const std::filesystem::path& file);

  explicit TemplateBank(std::vector<TemplateSpec> templates);
  const std::vector<TemplateSpec>& templates() const { return templates_; }

 private:
  std::vector<TemplateSpec> templates_;
};

/// The wh-forms of `tag`; throws preprocess::OntologyError for unknown tags.
std::vector<std::string> resolve_wh(std::string_view tag, const preprocess::Ontology& ontology);

/// First two sentences; "..." marks that the content continues.
std::string excerpt(std::string_view content);

/// One category per wh-form of each distinct non-disease entity, or per
/// wh-form of the disease tag when there is none. The highest-weight disease
/// fills DISEASE. Throws ConversionSkipped without a disease entity.
std::vector<aiml::Category> instantiate(const TemplateSpec& spec, const repository::NewsRecord& record,
                                        const preprocess::Ontology& ontology);

struct Skip {
  std::string record_id;
  std::string reason;
};

struct Conversion {
  std::vector<aiml::Category> categories;
  std::vector<Skip> skipped;
};

/// Records newest first (then by id), each across the bank in order.
Conversion convert_all(std::vector<repository::NewsRecord> records, const TemplateBank& bank,
                       const preprocess::Ontology& ontology);

/// Inserts in order (last write wins per pattern); returns how many
/// categories were written.
std::size_t populate(aiml::KnowledgeBase& kb, const std::vector<aiml::Category>& categories);

}  // namespace ccnet::converter
