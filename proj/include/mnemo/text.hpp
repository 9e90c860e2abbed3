#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mnemo {

// UTF-8 <-> code points. Invalid sequences decode to U+FFFD.
std::u32string utf8_decode(std::string_view text);
std::string utf8_encode(std::u32string_view text);

// Lowercases ASCII letters and the German uppercase letters (Ä Ö Ü ẞ).
std::string to_lower(std::string_view text);

// ä→a, ö→o, ü→u, ß→s; uppercase umlauts map to the lowercase targets.
std::string transliterate_umlauts(std::string_view text);

std::string trim(std::string_view text);

// Strips leading and trailing ASCII punctuation.
std::string strip_punctuation(std::string_view token);

// Whitespace split, lowercase, strip edge punctuation; empty tokens dropped.
std::vector<std::string> tokenize(std::string_view phrase);

bool starts_with_token(std::string_view text, std::string_view token);
bool contains_ci(std::string_view haystack, std::string_view needle);

std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

// 1 - d(a,b) / max(|a|,|b|) over code points, unit costs. Two empty
// strings are identical (1.0).
double normalized_levenshtein(std::string_view a, std::string_view b);

}  // namespace mnemo
