#include "ccnet/aiml/render.hpp"

namespace ccnet::aiml {

Response render(const std::optional<MatchResult>& result, const TemplateBody& fallback) {
  const TemplateBody& body = result ? result->category->body : fallback;
  Response r;
  r.text = body.text();
  if (const auto* cue = body.first_cue()) r.cue = *cue;
  if (const auto* push = body.first_push()) r.push = *push;
  r.matched = result.has_value();
  if (result) r.source_id = result->category->source_id;
  return r;
}

}  // namespace ccnet::aiml
