#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace valuecast::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// Case-folds, maps accented Latin letters to their ASCII base and collapses
// runs of whitespace to a single space. Used for join keys and lookups.
std::string normalize_key(std::string_view s);

// Strict parsers: the whole (trimmed) string must be consumed.
std::optional<double> parse_double(std::string_view s);
std::optional<long> parse_int(std::string_view s);

// Shortest representation that round-trips; locale independent.
std::string format_double(double x);
std::string format_fixed(double x, int decimals);

double round_to(double x, int decimals);

}  // namespace valuecast::text
