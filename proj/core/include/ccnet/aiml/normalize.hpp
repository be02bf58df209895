#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ccnet/aiml/types.hpp"

namespace ccnet::aiml {

/// Lower-cases, splits on whitespace and punctuation, and trims word edges.
/// Hyphens, apostrophes and periods survive inside a word ("re-emerge",
/// "don't", "1.5"). Idempotent: normalize(join(normalize(x))) == normalize(x).
/// Returns an empty list for input without word characters.
std::vector<Token> normalize(std::string_view raw);

std::string join(std::span<const Token> tokens);

}  // namespace ccnet::aiml
