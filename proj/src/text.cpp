#include "tomoforge/text.hpp"

#include <charconv>
#include <cmath>

#include "tomoforge/error.hpp"

namespace tomoforge {

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw FormatError("cannot format number");
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw FormatError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

long long parse_int(std::string_view text) {
  text = trim(text);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw FormatError("not an integer: '" + std::string(text) + "'");
  }
  return value;
}

double parse_real_expr(std::string_view text) {
  text = trim(text);
  constexpr std::string_view prefix = "sqrt(";
  if (text.starts_with(prefix) && text.ends_with(")")) {
    const double inner = parse_double(text.substr(prefix.size(), text.size() - prefix.size() - 1));
    if (inner < 0.0) throw FormatError("sqrt of a negative number");
    return std::sqrt(inner);
  }
  return parse_double(text);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

}  // namespace tomoforge
