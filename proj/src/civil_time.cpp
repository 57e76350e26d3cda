/**
 * @file civil_time.cpp
 * @brief ISO-8601 parsing and formatting.
 */
#include "diurnal/civil_time.hpp"

#include <charconv>
#include <cstdio>

namespace diurnal {
namespace {

bool read_fixed(std::string_view text, std::size_t pos, std::size_t width, int& out) {
  if (pos + width > text.size()) {
    return false;
  }
  for (std::size_t i = pos; i < pos + width; ++i) {
    if (text[i] < '0' || text[i] > '9') {
      return false;
    }
  }
  const auto res = std::from_chars(text.data() + pos, text.data() + pos + width, out);
  return res.ec == std::errc{};
}

}  // namespace

std::optional<Timestamp> parse_iso8601(std::string_view text) {
  CivilTime c;
  if (text.size() < 16 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':') {
    return std::nullopt;
  }
  if (!read_fixed(text, 0, 4, c.date.year) || !read_fixed(text, 5, 2, c.date.month) ||
      !read_fixed(text, 8, 2, c.date.day) || !read_fixed(text, 11, 2, c.hour) || !read_fixed(text, 14, 2, c.minute)) {
    return std::nullopt;
  }
  std::size_t pos = 16;
  if (pos < text.size() && text[pos] == ':') {
    if (!read_fixed(text, pos + 1, 2, c.second)) {
      return std::nullopt;
    }
    pos += 3;
  }
  const std::string_view rest = text.substr(pos);
  if (!rest.empty() && rest != "Z" && rest != "+00:00") {
    return std::nullopt;
  }
  if (c.date.month < 1 || c.date.month > 12 || c.date.day < 1 ||
      c.date.day > days_in_month(c.date.year, c.date.month) || c.hour > 23 || c.minute > 59 || c.second > 59) {
    return std::nullopt;
  }
  return to_timestamp(c);
}

std::string format_iso8601(Timestamp t) {
  const CivilDate d = date_of(t);
  const Timestamp secs = t - floor_div(t, kDay) * kDay;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", d.year, d.month, d.day,
                static_cast<int>(secs / 3600), static_cast<int>((secs / 60) % 60), static_cast<int>(secs % 60));
  return buf;
}

}  // namespace diurnal
