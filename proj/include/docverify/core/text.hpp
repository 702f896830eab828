#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace docverify::text {

std::string_view trim(std::string_view s);
std::string trim_copy(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);
bool ends_with(std::string_view s, std::string_view suffix);
bool contains(std::string_view haystack, std::string_view needle);

std::vector<std::string> split_lines(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Collapses every run of whitespace to a single space and trims both ends.
std::string normalize_whitespace(std::string_view s);

std::size_t count_occurrences(std::string_view haystack, std::string_view needle);

// Replaces each `{name}` whose name is a key of `values` in a single pass;
// substituted text is never rescanned and unknown braces are left alone.
std::string substitute(std::string_view tmpl,
                       const std::vector<std::pair<std::string, std::string>>& values);

// Fenced code blocks (```lang ... ```) in order of appearance.
std::vector<std::string> fenced_blocks(std::string_view response);

// Concatenated fenced blocks, or the whole response when it has none.
std::string code_from_response(std::string_view response);

// Filesystem-safe rendering of an arbitrary identifier.
std::string sanitize_for_path(std::string_view id);

}  // namespace docverify::text
