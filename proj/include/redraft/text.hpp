#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared by the prompt builders, the simulation harness and metrics.
namespace redraft::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool starts_with_ci(std::string_view s, std::string_view prefix);

std::vector<std::string> split_lines(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Lowercased alphanumeric tokens.
std::vector<std::string> tokenize(std::string_view s);

/// Case-insensitive search for `phrase` bounded by non-alphanumeric characters.
bool contains_phrase(std::string_view haystack, std::string_view phrase);

/// Case-insensitive substring search without boundary checks.
bool contains_ci(std::string_view haystack, std::string_view needle);

/// Sentences split on terminal punctuation followed by whitespace or end of text.
std::vector<std::string> split_sentences(std::string_view s);

/// Lowercase, trim, collapse internal whitespace.
std::string normalize(std::string_view s);

/// FNV-1a, stable across platforms.
std::uint64_t fnv1a(std::string_view s, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Round half away from zero to `decimals` places.
double round_half_away(double value, int decimals);

std::string replace_all(std::string s, std::string_view from, std::string_view to);

} // namespace redraft::text
