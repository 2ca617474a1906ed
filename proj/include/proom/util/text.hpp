#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace proom::util {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);
/// Fixed-point text with `decimals` digits after the point.
std::string format_fixed(double value, int decimals);
/// Parses a full decimal number; returns false on trailing garbage.
bool parse_number(std::string_view text, double& out);

std::string_view trim(std::string_view s);
std::vector<std::string> split_lines(std::string_view text);
std::string to_lower(std::string_view s);
bool contains_word(std::string_view haystack, std::string_view word);

}  // namespace proom::util
