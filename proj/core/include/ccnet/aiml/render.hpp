#pragma once

#include <optional>

#include "ccnet/aiml/types.hpp"

namespace ccnet::aiml {

inline constexpr const char* kDefaultFallbackText = "I don't have information on that yet.";

/// Response for a match, or for `fallback` (matched = false) when absent.
/// Text parts are joined; the first cue and first push are attached.
Response render(const std::optional<MatchResult>& result, const TemplateBody& fallback);

}  // namespace ccnet::aiml
