#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tomoforge {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

/// Strict full-string parse; throws FormatError on trailing garbage.
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

/// Parses a real number or sqrt(x) (e.g. "sqrt(0.1)").
double parse_real_expr(std::string_view text);

std::vector<std::string_view> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

}  // namespace tomoforge
