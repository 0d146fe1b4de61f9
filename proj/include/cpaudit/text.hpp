#pragma once

#include <string>
#include <vector>

namespace cpaudit::text {

/// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double v);

std::string to_lower(std::string s);
std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);

/// Collapses runs of whitespace to single spaces and trims the ends.
std::string collapse_spaces(const std::string& s);

}  // namespace cpaudit::text
