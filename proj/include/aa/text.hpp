#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace aa {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

std::string_view trim(std::string_view s);
std::string_view trim_right(std::string_view s);

// ASCII-only; UTF-8 continuation bytes pass through untouched.
std::string to_lower(std::string_view s);

std::vector<std::string_view> split_whitespace(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// Drops trailing .,;:!? characters.
std::string_view strip_trailing_punct(std::string_view s);

bool is_url(std::string_view token);

}  // namespace aa
