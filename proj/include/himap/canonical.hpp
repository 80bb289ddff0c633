#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace himap {

/// Venue key: lower-cased, punctuation stripped, whitespace collapsed to
/// single spaces and trimmed. "The Ritz Hotel!" -> "the ritz hotel".
std::string canonicalize(std::string_view raw_name);

std::size_t levenshtein(std::string_view a, std::string_view b);

/// 1 - levenshtein(a, b) / max(|a|, |b|). Equal strings score 1, a non-empty
/// string against the empty string scores 0.
double similarity(std::string_view a, std::string_view b);

/// True when one key's tokens form a whole-token prefix or suffix of the
/// other's ("the ritz" / "the ritz hotel"). Empty keys never contain.
bool token_contained(std::string_view a, std::string_view b);

/// Fuzzy duplicate test on canonical keys: similarity >= tau, or token
/// containment. `tau` must lie in [0, 1].
bool is_duplicate(std::string_view key_a, std::string_view key_b, double tau);

std::vector<std::string_view> split_tokens(std::string_view key);

}  // namespace himap
