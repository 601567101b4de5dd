#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace revr {

std::string ascii_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

// Trims ASCII whitespace from both ends.
std::string_view trim(std::string_view s);

// Splits on runs of Unicode whitespace (UTF-8 input). Malformed UTF-8 bytes
// are kept as part of the surrounding token.
std::vector<std::string> split_unicode_whitespace(std::string_view s);

std::size_t count_occurrences(std::string_view haystack, std::string_view needle);

}  // namespace revr
