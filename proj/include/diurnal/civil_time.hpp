/**
 * @file civil_time.hpp
 * @brief UTC timestamps as seconds since the Unix epoch, proleptic Gregorian calendar.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace diurnal {

using Timestamp = std::int64_t;  ///< seconds since 1970-01-01T00:00:00Z
using Duration = std::int64_t;   ///< seconds

inline constexpr Duration kHalfHour = 1800;
inline constexpr Duration kHour = 3600;
inline constexpr Duration kDay = 86400;

struct CivilDate {
  int year{};
  int month{};  ///< 1-12
  int day{};    ///< 1-31
  friend bool operator==(const CivilDate&, const CivilDate&) = default;
};

struct CivilTime {
  CivilDate date;
  int hour{};
  int minute{};
  int second{};
};

constexpr bool is_leap_year(int y) noexcept { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

constexpr int days_in_month(int y, int m) noexcept {
  constexpr int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return (m == 2 && is_leap_year(y)) ? 29 : kDays[m - 1];
}

constexpr int days_in_year(int y) noexcept { return is_leap_year(y) ? 366 : 365; }

/// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
constexpr std::int64_t days_from_civil(int y, int m, int d) noexcept {
  y -= m <= 2 ? 1 : 0;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned mp = static_cast<unsigned>(m > 2 ? m - 3 : m + 9);
  const unsigned doy = (153U * mp + 2U) / 5U + static_cast<unsigned>(d) - 1U;
  const unsigned doe = yoe * 365U + yoe / 4U - yoe / 100U + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr CivilDate civil_from_days(std::int64_t z) noexcept {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460U + doe / 36524U - doe / 146096U) / 365U;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365U * yoe + yoe / 4U - yoe / 100U);
  const unsigned mp = (5U * doy + 2U) / 153U;
  const unsigned d = doy - (153U * mp + 2U) / 5U + 1U;
  const unsigned m = mp < 10U ? mp + 3U : mp - 9U;
  return {static_cast<int>(y + (m <= 2U ? 1 : 0)), static_cast<int>(m), static_cast<int>(d)};
}

constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept {
  return a / b - ((a % b != 0) && ((a < 0) != (b < 0)) ? 1 : 0);
}

constexpr CivilDate date_of(Timestamp t) noexcept { return civil_from_days(floor_div(t, kDay)); }

constexpr int hour_of(Timestamp t) noexcept { return static_cast<int>((t - floor_div(t, kDay) * kDay) / kHour); }

/// 1-based ordinal day within the year.
constexpr int day_of_year(const CivilDate& d) noexcept {
  return static_cast<int>(days_from_civil(d.year, d.month, d.day) - days_from_civil(d.year, 1, 1)) + 1;
}

constexpr Timestamp to_timestamp(const CivilTime& c) noexcept {
  return days_from_civil(c.date.year, c.date.month, c.date.day) * kDay + c.hour * kHour + c.minute * 60 +
         c.second;
}

constexpr Timestamp floor_to(Timestamp t, Duration step) noexcept { return floor_div(t, step) * step; }

/**
 * @brief Parse an ISO-8601 UTC timestamp.
 *
 * Accepts `YYYY-MM-DDTHH:MM[:SS][Z]`, a space instead of `T`, and a `+00:00` suffix.
 * Returns nullopt on anything else, including non-UTC offsets.
 */
std::optional<Timestamp> parse_iso8601(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SSZ`
std::string format_iso8601(Timestamp t);

}  // namespace diurnal
