#pragma once

// Internal string helpers. UTF-8 aware only as far as the Latin-1 supplement,
// which covers the German umlauts the keyword lists need.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace accsams::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
/// Collapses every whitespace run (including newlines) into one space and trims.
std::string collapse_whitespace(std::string_view s);
std::vector<std::string> split_lines(std::string_view s);
bool starts_with_ci(std::string_view haystack, std::string_view prefix);
/// Non-overlapping occurrence count; 0 for an empty needle.
std::size_t count_occurrences(std::string_view haystack, std::string_view needle);
bool is_space(char c);
bool is_lowercase(std::string_view s);

}  // namespace accsams::text
